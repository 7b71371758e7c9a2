/* cpu identification fixture 8 */
#include <string.h>

struct cpu_info_8 {
    unsigned family;
    unsigned model;
    char name[64];
};

static unsigned extract_bits_8(unsigned reg, int hi, int lo) {
    return (reg >> lo) & ((1u << (hi - lo + 1)) - 1);
}

const char *decode_cpu_name_8(struct cpu_info_8 *info, unsigned eax) {
    info->family = extract_bits_8(eax, 11, 8);
    info->model = extract_bits_8(eax, 7, 4);
    if (info->family == 6)
        strcpy(info->name, "core-family-8");
    else
        strcpy(info->name, "unknown-8");
    return info->name;
}
