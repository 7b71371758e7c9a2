/* matrix product fixture 14: naive */

void matmul_14(const double *a, const double *b, double *c, int n) {
    for (int r = 0; r < n; r++)
        for (int col = 0; col < n; col++) {
            double acc = 0.0;
            for (int k = 0; k < n; k++)
                acc += a[r * n + k] * b[k * n + col];
            c[r * n + col] = acc;
        }
}
