/* cpu identification fixture 16 */
#include <string.h>

struct cpu_info_16 {
    unsigned family;
    unsigned model;
    char name[64];
};

static unsigned extract_bits_16(unsigned reg, int hi, int lo) {
    return (reg >> lo) & ((1u << (hi - lo + 1)) - 1);
}

const char *decode_cpu_name_16(struct cpu_info_16 *info, unsigned eax) {
    info->family = extract_bits_16(eax, 11, 8);
    info->model = extract_bits_16(eax, 7, 4);
    if (info->family == 6)
        strcpy(info->name, "core-family-16");
    else
        strcpy(info->name, "unknown-16");
    return info->name;
}
