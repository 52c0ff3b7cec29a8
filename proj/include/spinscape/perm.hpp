#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace spinscape {

// Permutation of {0,1,2}. img[i] is the image of i.
struct Perm3 {
  std::array<int, 3> img{0, 1, 2};

  int operator()(int i) const { return img[i]; }
  bool operator==(const Perm3& o) const { return img == o.img; }
  bool is_identity() const { return img == std::array<int, 3>{0, 1, 2}; }

  Perm3 inverse() const {
    Perm3 r;
    for (int i = 0; i < 3; ++i) r.img[img[i]] = i;
    return r;
  }

  // +1 for even, -1 for odd.
  int sign() const {
    int s = 1;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (img[i] > img[j]) s = -s;
    return s;
  }

  std::string str() const;
};

// Applies b first, then a.
inline Perm3 compose(const Perm3& a, const Perm3& b) {
  Perm3 r;
  for (int i = 0; i < 3; ++i) r.img[i] = a.img[b.img[i]];
  return r;
}

inline Perm3 perm3_cycle012() { return Perm3{{1, 2, 0}}; }
inline Perm3 perm3_cycle021() { return Perm3{{2, 0, 1}}; }
inline Perm3 perm3_swap(int a, int b) {
  Perm3 r;
  r.img[a] = b;
  r.img[b] = a;
  return r;
}

const std::array<Perm3, 6>& all_perm3();
int perm3_index(const Perm3& p);

// Permutation of {0,1,2,3}.
struct Perm4 {
  std::array<int, 4> img{0, 1, 2, 3};

  int operator()(int i) const { return img[i]; }
  bool operator==(const Perm4& o) const { return img == o.img; }

  Perm4 inverse() const {
    Perm4 r;
    for (int i = 0; i < 4; ++i) r.img[img[i]] = i;
    return r;
  }

  int sign() const {
    int s = 1;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (img[i] > img[j]) s = -s;
    return s;
  }
};

inline Perm4 compose(const Perm4& a, const Perm4& b) {
  Perm4 r;
  for (int i = 0; i < 4; ++i) r.img[i] = a.img[b.img[i]];
  return r;
}

}  // namespace spinscape
