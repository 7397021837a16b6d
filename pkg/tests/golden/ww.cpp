struct E {};
template<typename T> struct A {};
template<typename T> struct B {};
template<typename T> struct S {};
A<E> a() {}
B<E> b() {}
template<typename T> A<T> a(T) {}
template<typename T> B<T> b(T) {}
template<typename T> S<T> s(T) {}
template<typename T> auto $(A<T>) { return match_a($(T())); }
template<typename T> auto $(B<T>) { return match_b($(T())); }
template<typename T> auto $(S<T>) { return reverse(T()); }
template<typename T> auto reverse(A<T>) { return append2end_a(reverse(T())); }
template<typename T> auto reverse(B<T>) { return append2end_b(reverse(T())); }
E reverse(E) {}
template<typename T> auto append2end_a(A<T>) { return append2start_a(append2end_a(T())); }
template<typename T> auto append2end_a(B<T>) { return append2start_b(append2end_a(T())); }
A<E> append2end_a(E) {}
template<typename T> auto append2end_b(A<T>) { return append2start_a(append2end_b(T())); }
template<typename T> auto append2end_b(B<T>) { return append2start_b(append2end_b(T())); }
B<E> append2end_b (E) {}
template<typename T> A<T> append2start_a(T) {}
template<typename T> B<T> append2start_b(T) {}
template<typename T> T match_a(A<T>) {}
template<typename T> T match_b(B<T>) {}
int main() {
  E w1=$(a(b(a(a(s(a(b(a(a()))))))))); // accepted
  E w2=$(a(b(a(a(s(a(b(b(a()))))))))); // rejected
  E w3=$(b(a(a(s(a(b(a(a())))))))); } // rejected
