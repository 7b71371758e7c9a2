/* throughput benchmark fixture 6: histogram */

void kernel_main_6(const unsigned char *pixels, unsigned *bins, int n) {
    for (int t = 0; t < 256; t++)
        bins[t] = 0;
    for (int t = 0; t < n; t++)
        bins[pixels[t]]++;
}
