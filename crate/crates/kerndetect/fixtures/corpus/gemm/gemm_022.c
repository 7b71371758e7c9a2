/* matrix product fixture 22: unrolled */

void matmul_22(const double *a, const double *b, double *c, int n) {
    for (int r = 0; r < n; r++) {
        for (int col = 0; col < n; col++) {
            double acc = 0.0;
            int k = 0;
            for (; k + 4 <= n; k += 4) {
                acc += a[r * n + k] * b[k * n + col];
                acc += a[r * n + k + 1] * b[(k + 1) * n + col];
                acc += a[r * n + k + 2] * b[(k + 2) * n + col];
                acc += a[r * n + k + 3] * b[(k + 3) * n + col];
            }
            for (; k < n; k++)
                acc += a[r * n + k] * b[k * n + col];
            c[r * n + col] = acc;
        }
    }
}
