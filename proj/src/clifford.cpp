#include "sage/clifford.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "sage/analysis.hpp"

namespace sage {

Eigen::Matrix2cd rotation(const Eigen::Vector3d& axis, double angle) {
  Eigen::Matrix2cd u;
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  const Eigen::Vector3d n = axis.norm() > 0 ? Eigen::Vector3d(axis.normalized()) : axis;
  u << cplx(c, -s * n.z()), cplx(-s * n.y(), -s * n.x()),
       cplx(s * n.y(), -s * n.x()), cplx(c, s * n.z());
  return u;
}

namespace {

struct Row {
  double angle_over_pi;
  std::array<double, 3> axis;
  const char* description;
  std::vector<std::string> gates;
};

std::vector<CliffordElement> build() {
  const double pi = std::numbers::pi;
  const std::vector<Row> rows = {
      {0.0, {0, 0, 0}, "identity", {"I"}},
      {1.0, {1, 0, 0}, "pi about x", {"X"}},
      {1.0, {0, 1, 0}, "pi about y", {"Z", "X"}},
      {1.0, {0, 0, 1}, "pi about z", {"Z"}},
      {0.5, {0, 0, 1}, "+pi/2 about z", {"S"}},
      {-0.5, {0, 0, 1}, "-pi/2 about z", {"Sdg"}},
      {0.5, {1, 0, 0}, "+pi/2 about x", {"SqrtX"}},
      {-0.5, {1, 0, 0}, "-pi/2 about x", {"SqrtXdg"}},
      {0.5, {0, 1, 0}, "+pi/2 about y", {"X", "H"}},
      {-0.5, {0, 1, 0}, "-pi/2 about y", {"Z", "H"}},
      {1.0, {1, 0, 1}, "pi about (x+z)/sqrt2", {"H"}},
      {1.0, {1, 0, -1}, "pi about (x-z)/sqrt2", {"Hp"}},
      {1.0, {1, 1, 0}, "pi about (x+y)/sqrt2", {"X", "S"}},
      {1.0, {1, -1, 0}, "pi about (x-y)/sqrt2", {"X", "Sdg"}},
      {1.0, {0, 1, 1}, "pi about (y+z)/sqrt2", {"Z", "SqrtXdg"}},
      {1.0, {0, 1, -1}, "pi about (y-z)/sqrt2", {"Z", "SqrtX"}},
      {2.0 / 3, {1, 1, 1}, "+2pi/3 about (1,1,1)", {"H", "S"}},
      {-2.0 / 3, {1, 1, 1}, "-2pi/3 about (1,1,1)", {"H", "SqrtX"}},
      {2.0 / 3, {-1, 1, 1}, "+2pi/3 about (-1,1,1)", {"Sdg", "SqrtX"}},
      {-2.0 / 3, {-1, 1, 1}, "-2pi/3 about (-1,1,1)", {"SqrtX", "Sdg"}},
      {2.0 / 3, {1, -1, 1}, "+2pi/3 about (1,-1,1)", {"SqrtXdg", "S"}},
      {-2.0 / 3, {1, -1, 1}, "-2pi/3 about (1,-1,1)", {"S", "SqrtXdg"}},
      {2.0 / 3, {1, 1, -1}, "+2pi/3 about (1,1,-1)", {"H", "Sdg"}},
      {-2.0 / 3, {1, 1, -1}, "-2pi/3 about (1,1,-1)", {"H", "SqrtXdg"}},
  };
  std::vector<CliffordElement> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    CliffordElement e;
    e.index = static_cast<int>(i);
    e.axis = Eigen::Vector3d(r.axis[0], r.axis[1], r.axis[2]);
    if (e.axis.norm() > 0) e.axis.normalize();
    e.angle = r.angle_over_pi * pi;
    e.target = rotation(e.axis, e.angle);
    e.description = r.description;
    e.age_gates = r.gates;
    out.push_back(std::move(e));
  }
  return out;
}

struct Tables {
  std::array<std::array<int, 24>, 24> product{};
  std::array<int, 24> inverse{};
};

const Tables& tables() {
  static const Tables t = [] {
    Tables out;
    const auto& g = clifford_group();
    for (int a = 0; a < 24; ++a) {
      for (int b = 0; b < 24; ++b) {
        const int c = clifford_index_of(g[a].target * g[b].target);
        if (c < 0) throw Error("Clifford table is not closed");
        out.product[a][b] = c;
        if (c == 0) out.inverse[a] = b;
      }
    }
    return out;
  }();
  return t;
}

}  // namespace

const std::vector<CliffordElement>& clifford_group() {
  static const std::vector<CliffordElement> g = build();
  return g;
}

int clifford_index_of(const Eigen::Matrix2cd& u, double tol) {
  const auto& g = clifford_group();
  for (const CliffordElement& e : g) {
    if (phase_distance(u, e.target) < tol) return e.index;
  }
  return -1;
}

int clifford_multiply(int a, int b) { return tables().product.at(a).at(b); }

int clifford_inverse(int a) { return tables().inverse.at(a); }

}  // namespace sage
