#include <socketlab/socketlab.h>

#include <stdio.h>
#include <string.h>

int main(void) {
    double v = 0.0;
    if (sl_vswr(0.2, 0.0, &v) != SL_OK || v < 1.49 || v > 1.51) return 1;
    if (strcmp(sl_version(), "1.0.0") != 0) return 1;
    printf("socketlab %s\n", sl_version());
    return 0;
}
