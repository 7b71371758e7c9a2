/* cpu identification fixture 9 */
#include <string.h>

struct cpu_info_9 {
    unsigned family;
    unsigned model;
    char name[64];
};

static unsigned extract_bits_9(unsigned reg, int hi, int lo) {
    return (reg >> lo) & ((1u << (hi - lo + 1)) - 1);
}

const char *decode_cpu_name_9(struct cpu_info_9 *info, unsigned eax) {
    info->family = extract_bits_9(eax, 11, 8);
    info->model = extract_bits_9(eax, 7, 4);
    if (info->family == 6)
        strcpy(info->name, "core-family-9");
    else
        strcpy(info->name, "unknown-9");
    return info->name;
}
