/* cpu identification fixture 18 */
#include <string.h>

struct cpu_info_18 {
    unsigned family;
    unsigned model;
    char name[64];
};

static unsigned extract_bits_18(unsigned reg, int hi, int lo) {
    return (reg >> lo) & ((1u << (hi - lo + 1)) - 1);
}

const char *decode_cpu_name_18(struct cpu_info_18 *info, unsigned eax) {
    info->family = extract_bits_18(eax, 11, 8);
    info->model = extract_bits_18(eax, 7, 4);
    if (info->family == 6)
        strcpy(info->name, "core-family-18");
    else
        strcpy(info->name, "unknown-18");
    return info->name;
}
