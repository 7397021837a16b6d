interface γ1<x1, x2> {}
interface γ2<x1, x2> {}
interface γ3<x2> {}
static γ1<Zero,Zero> begin() { return null; }
static <x1, x2> γ1<Succ<x1>, Succ<x2>> a(γ1<x1, x2> e) { return null; }
static <x1, x2> γ2<x1, x2> b(γ1<Succ<x1>, x2> e) { return null; }
static <x1, x2> γ2<x1, x2> b(γ2<Succ<x1>, x2> e) { return null; }
static <x> γ3<x> c(γ2<Zero, Succ<x>> e) { return null; }
static <x> γ3<x> c(γ3<Succ<x>> e) { return null; }
static void end(γ3<Zero> e) {}
static {
  end(c(c(c(b(b(b(a(a(a(begin())))))))))); // accepted
  end(c(c(c(b(b(a(a(a(begin()))))))))); // rejected
}
