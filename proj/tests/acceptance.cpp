// placeholder main for the standalone acceptance binary
int main() { return 0; }
