/* throughput benchmark fixture 4: reduce */

float kernel_main_4(const float *x, int n) {
    float acc = 0.0f;
    for (int t = 0; t < n; t++)
        acc += x[t];
    return acc;
}
