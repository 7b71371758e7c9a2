/* cpu identification fixture 13 */
#include <string.h>

struct cpu_info_13 {
    unsigned family;
    unsigned model;
    char name[64];
};

static unsigned extract_bits_13(unsigned reg, int hi, int lo) {
    return (reg >> lo) & ((1u << (hi - lo + 1)) - 1);
}

const char *decode_cpu_name_13(struct cpu_info_13 *info, unsigned eax) {
    info->family = extract_bits_13(eax, 11, 8);
    info->model = extract_bits_13(eax, 7, 4);
    if (info->family == 6)
        strcpy(info->name, "core-family-13");
    else
        strcpy(info->name, "unknown-13");
    return info->name;
}
