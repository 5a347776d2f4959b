/* util */
static const char *name = "b";
int twice(int v) { return add(v, v); }
