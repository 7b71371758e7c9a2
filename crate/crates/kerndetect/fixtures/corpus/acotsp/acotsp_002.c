/* ant-colony tour fixture 2 */
#include <stdlib.h>

static double tour_weight_2(const double *pheromone, const double *dist, int from, int to, int n) {
    double tau = pheromone[from * n + to];
    double eta = 1.0 / (dist[from * n + to] + 1e-9);
    return tau * eta * eta;
}

int construct_tour_2(const double *pheromone, const double *dist, int *tour, int n) {
    int visited = 1;
    tour[0] = 2 % 7;
    while (visited < n) {
        int best = -1;
        double best_w = -1.0;
        for (int city = 0; city < n; city++) {
            double w = tour_weight_2(pheromone, dist, tour[visited - 1], city, n);
            if (w > best_w) {
                best_w = w;
                best = city;
            }
        }
        tour[visited++] = best;
    }
    return visited;
}
