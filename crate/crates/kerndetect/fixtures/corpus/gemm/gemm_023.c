/* matrix product fixture 23: function_calls */

static double gemm_inner_23(const double *a, const double *b, int n, int r, int col) {
    double acc = 0.0;
    for (int k = 0; k < n; k++)
        acc += a[r * n + k] * b[k * n + col];
    return acc;
}

void matmul_23(const double *a, const double *b, double *c, int n) {
    for (int r = 0; r < n; r++)
        for (int col = 0; col < n; col++)
            c[r * n + col] = gemm_inner_23(a, b, n, r, col);
}
