/* throughput benchmark fixture 9: reduce */

float kernel_main_9(const float *x, int n) {
    float acc = 0.0f;
    for (int t = 0; t < n; t++)
        acc += x[t];
    return acc;
}
