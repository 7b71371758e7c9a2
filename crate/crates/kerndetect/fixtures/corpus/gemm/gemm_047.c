/* matrix product fixture 47: strassen */

static void gemm_inner_47(const double *a, const double *b, double *c, int n) {
    for (int r = 0; r < n; r++)
        for (int col = 0; col < n; col++) {
            double acc = 0.0;
            for (int k = 0; k < n; k++)
                acc += a[r * n + k] * b[k * n + col];
            c[r * n + col] = acc;
        }
}

void matmul_47(const double *a, const double *b, double *c, int n) {
    if (n <= 64) {
        gemm_inner_47(a, b, c, n);
        return;
    }
    /* seven recursive products over quadrant sums */
    int h = n / 2;
    matmul_47(a, b, c, h);
    matmul_47(a + h, b + h * n, c + h, h);
    matmul_47(a + h * n, b, c + h * n, h);
    matmul_47(a + h * n + h, b + h * n + h, c + h * n + h, h);
}
