int main(void) { unsigned int n = sizeof(long); return n; }
