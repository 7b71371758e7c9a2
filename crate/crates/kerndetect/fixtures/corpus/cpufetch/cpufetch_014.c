/* cpu identification fixture 14 */
#include <string.h>

struct cpu_info_14 {
    unsigned family;
    unsigned model;
    char name[64];
};

static unsigned extract_bits_14(unsigned reg, int hi, int lo) {
    return (reg >> lo) & ((1u << (hi - lo + 1)) - 1);
}

const char *decode_cpu_name_14(struct cpu_info_14 *info, unsigned eax) {
    info->family = extract_bits_14(eax, 11, 8);
    info->model = extract_bits_14(eax, 7, 4);
    if (info->family == 6)
        strcpy(info->name, "core-family-14");
    else
        strcpy(info->name, "unknown-14");
    return info->name;
}
