/* sample */
#include <stdio.h>

int main(void) {
    int x = 0x1F;
    char *s = "hi";
    x += 2; // bump
    return x > 3 ? 1 : 0;
}
