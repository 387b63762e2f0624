#include "doctest.h"

#include <cmath>
#include <vector>

#include "mpsm/rng.hpp"

using namespace mpsm;

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(RngStream::philox(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(RngStream::philox(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(RngStream::philox(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 0), b(42, 0), c(42, 1), e(43, 0);
  std::vector<std::uint64_t> va, vb, vc, ve;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
    vc.push_back(c.next_u64());
    ve.push_back(e.next_u64());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != ve);
}

TEST_CASE("split does not depend on the parent position") {
  RngStream parent(7, 3);
  const RngStream early = parent.split(5);
  for (int i = 0; i < 11; ++i) parent.next_u32();
  RngStream late = parent.split(5);
  RngStream e = early;
  for (int i = 0; i < 8; ++i) CHECK(e.next_u64() == late.next_u64());
  RngStream other = parent.split(6);
  RngStream e2 = early;
  CHECK(e2.next_u64() != other.next_u64());
}

TEST_CASE("state roundtrip resumes mid-buffer") {
  RngStream r(11, 2);
  for (int i = 0; i < 7; ++i) r.next_u32();  // leaves a partly used block
  RngStream copy = RngStream::from_state(r.state());
  CHECK(copy.state() == r.state());
  for (int i = 0; i < 20; ++i) CHECK(copy.next_u32() == r.next_u32());
}

TEST_CASE("distribution moments") {
  RngStream r(2024, 0);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sc2 = 0;
  double umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
    sc2 += std::norm(r.complex_normal());
  }
  CHECK(umin >= 0.0);
  CHECK(umax < 1.0);
  // 5 sigma bands
  CHECK(std::abs(su / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sn / n) < 5 / std::sqrt(n));
  CHECK(std::abs(sn2 / n - 1.0) < 5 * std::sqrt(2.0 / n));
  CHECK(std::abs(sc2 / n - 1.0) < 5 * std::sqrt(1.0 / n));
}
