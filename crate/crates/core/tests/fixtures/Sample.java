package demo;
// entry
public class Main {
    static final long N = 10_000L;
    public static void main(String[] args) {
        System.out.println("n=" + N);
    }
}
