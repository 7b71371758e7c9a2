/* matrix product fixture 32: goto */

static void gemm_inner_32(const double *ap, const double *bp, double *cp, int n, int kc) {
    for (int k = 0; k < kc; k++)
        for (int col = 0; col < n; col++)
            cp[col] += ap[k] * bp[k * n + col];
}

void matmul_32(const double *a, const double *b, double *c, int n) {
    /* blocked panel-panel update in the style of high-performance kernels */
    for (int r = 0; r < n; r++)
        gemm_inner_32(&a[r * n], b, &c[r * n], n, n);
}
