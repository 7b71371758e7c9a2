/* throughput benchmark fixture 8: saxpy */

void kernel_main_8(float alpha, const float *x, float *y, int n) {
    for (int t = 0; t < n; t++)
        y[t] = alpha * x[t] + y[t];
}
