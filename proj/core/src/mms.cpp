#include "pulsefront/mms.hpp"

#include <cmath>
#include <numbers>

#include "pulsefront/errors.hpp"
#include "pulsefront/fields.hpp"

namespace pulsefront {

Factor1D Factor1D::cosine(double k, double phase, double amp) {
  return {[=](double t) {
    const double c = std::cos(k * t + phase), s = std::sin(k * t + phase);
    return std::array<double, 3>{amp * c, -amp * k * s, -amp * k * k * c};
  }};
}

Factor1D Factor1D::polynomial(std::vector<double> coeffs) {
  return {[coeffs](double t) {
    std::array<double, 3> r{0.0, 0.0, 0.0};
    for (std::size_t p = coeffs.size(); p-- > 0;) {
      r[2] = r[2] * t + 2.0 * r[1];
      r[1] = r[1] * t + r[0];
      r[0] = r[0] * t + coeffs[p];
    }
    return r;
  }};
}

Factor1D Factor1D::constant(double v) { return polynomial({v}); }

ManufacturedSolution::Jet ManufacturedSolution::jet(double s, double x, double z) const {
  Jet j{};
  for (const Term& t : terms) {
    const auto A = t.a.eval(s), B = t.b.eval(x), C = t.c.eval(z);
    j.g += A[0] * B[0] * C[0];
    j.gs += A[1] * B[0] * C[0];
    j.gx += A[0] * B[1] * C[0];
    j.gz += A[0] * B[0] * C[1];
    j.gss += A[2] * B[0] * C[0];
    j.gsx += A[1] * B[1] * C[0];
    j.gxx += A[0] * B[2] * C[0];
    j.gzz += A[0] * B[0] * C[2];
    j.gsz += A[1] * B[0] * C[1];
    j.gxz += A[0] * B[1] * C[1];
  }
  return j;
}

double ManufacturedSolution::L_epsilon(double s, double x, double z, double eps) const {
  const Jet j = jet(s, x, z);
  return (1.0 + eps) * j.gss + 2.0 * j.gsx + j.gxx + j.gzz;
}

ManufacturedSolution ManufacturedSolution::standard(double ell) {
  const double k = 2.0 * std::numbers::pi / ell;
  const double pi = std::numbers::pi;
  ManufacturedSolution m;
  // cos(k (x + s)) cos(pi z), split into separable products
  m.terms.push_back({Factor1D::cosine(k), Factor1D::cosine(k), Factor1D::cosine(pi)});
  m.terms.push_back({Factor1D::cosine(k, pi / 2), Factor1D::cosine(k, -pi / 2), Factor1D::cosine(pi)});
  m.terms.push_back({Factor1D::cosine(0.5, -pi / 2, 0.5), Factor1D::cosine(k, -pi / 2),
                     Factor1D::polynomial({1.0, 0.0, 1.0})});
  m.terms.push_back({Factor1D::polynomial({0.0, 0.3}), Factor1D::constant(1.0),
                     Factor1D::polynomial({0.0, 1.0})});
  return m;
}

const char* to_string(MmsRow r) {
  switch (r) {
    case MmsRow::L_epsilon: return "L_epsilon";
    case MmsRow::omega: return "omega";
    case MmsRow::psi: return "psi";
    case MmsRow::temperature: return "temperature";
  }
  return "L_epsilon";
}

GeometryConfig mms_geometry(bool wavy, int n_s, int n_x, int n_z, double a) {
  GeometryConfig g;
  g.ell = 1.0;
  g.half_width = 2.0;
  g.bottom = WallProfile::flat(0.0);
  g.top = wavy ? WallProfile::fourier(1.0, {}, {0.1}, 1.0) : WallProfile::flat(1.0);
  if (wavy) g.bottom = WallProfile::fourier(0.0, {0.05}, {}, 1.0);
  g.n_s = n_s;
  g.n_x = n_x;
  g.n_z = n_z;
  g.a = a;
  return g;
}

namespace {

double relative_l2(const GridField& num, const GridField& exact) {
  const GridField diff = num.like(num.values() - exact.values());
  const double d = norm(diff, NormKind::L2);
  const double e = norm(exact, NormKind::L2);
  return e > 0.0 ? d / e : d;
}

double level_error(MmsRow row, const CellPtr& cell, const MmsOptions& o) {
  const ManufacturedSolution ms = ManufacturedSolution::standard(cell->ell());
  const PeriodCell& c = *cell;
  const double pi = std::numbers::pi;

  GridField exact(cell, row == MmsRow::temperature ? BcTag::temperature
                        : row == MmsRow::psi       ? BcTag::stream
                                                   : BcTag::vorticity);
  exact.fill_physical([&](double s, double x, double z) { return ms.jet(s, x, z).g; });

  if (row == MmsRow::L_epsilon) {
    GridField ref = exact;
    ref.fill_physical([&](double s, double x, double z) { return ms.L_epsilon(s, x, z, o.eps); });
    return relative_l2(apply_L_epsilon(exact, o.eps), ref);
  }

  OperatorSpec op;
  op.eps = o.eps;
  op.drift = row == MmsRow::psi ? 0.0 : o.drift;
  GridField u1(cell, BcTag::velocity_component), u2(cell, BcTag::velocity_component);
  const bool advect = row == MmsRow::temperature;
  if (advect) {
    u1.fill_physical([&](double, double x, double z) {
      return 0.3 * std::cos(2.0 * pi * x / c.ell()) * std::sin(pi * z);
    });
    u2.fill_physical([&](double s, double, double) { return 0.2 * std::sin(0.5 * s); });
    op.u1 = &u1;
    op.u2 = &u2;
  }

  BoundarySpec bc;
  bc.walls = row == MmsRow::temperature ? WallCondition::conormal : WallCondition::dirichlet;
  bc.dirichlet = &exact;
  std::vector<double> q;
  if (row == MmsRow::temperature) {
    q.assign(static_cast<std::size_t>(c.n_s() + 1) * c.n_x() * 2, 0.0);
    for (int i = 0; i <= c.n_s(); ++i)
      for (int j = 0; j < c.n_x(); ++j)
        for (Wall w : {Wall::bottom, Wall::top}) {
          const int k = w == Wall::bottom ? 0 : c.n_z();
          const auto J = ms.jet(c.s_node(i), c.x_node(j), c.z_node(j, k));
          const auto eta = c.normal(j, w);
          q[wall_flux_index(c, i, j, w)] = eta[0] * (J.gs + J.gx) + eta[1] * J.gz;
        }
    bc.wall_flux = &q;
  }

  LinearSystem sys = assemble(op, bc, cell);
  // Right-hand side: A g* evaluated analytically at every active node.
  Eigen::VectorXd rhs = sys.b;
  for (std::size_t u = 0; u < sys.node_of_unknown.size(); ++u) {
    const std::size_t n = sys.node_of_unknown[u];
    const int k = static_cast<int>(n % c.nz_nodes());
    const int j = static_cast<int>((n / c.nz_nodes()) % c.n_x());
    const int i = static_cast<int>(n / (static_cast<std::size_t>(c.nz_nodes()) * c.n_x()));
    const double s = c.s_node(i), x = c.x_node(j), z = c.z_node(j, k);
    const auto J = ms.jet(s, x, z);
    double Ag = -ms.L_epsilon(s, x, z, o.eps) - op.drift * J.gs;
    if (advect) Ag += u1(i, j, k) * (J.gs + J.gx) + u2(i, j, k) * J.gz;
    rhs[static_cast<Eigen::Index>(u)] += Ag;
  }
  const Eigen::VectorXd x = solve(sys.A, rhs, o.linear);
  return relative_l2(sys.scatter(x, exact.tag()), exact);
}

}  // namespace

MmsResult run_mms(MmsRow row, bool wavy, const MmsOptions& o) {
  MmsResult r{row, wavy, {}, {}};
  for (int lvl = 0; lvl <= o.refinements; ++lvl) {
    const int f = 1 << lvl;
    const GeometryConfig g =
        mms_geometry(wavy, o.base_n_s * f, o.base_n_x * f, o.base_n_z * f, o.a);
    const CellPtr cell = build_period_cell(g);
    r.levels.push_back({g.n_s, g.n_x, g.n_z, cell->h_s(), level_error(row, cell, o)});
  }
  for (std::size_t l = 1; l < r.levels.size(); ++l)
    r.orders.push_back(std::log2(r.levels[l - 1].error / r.levels[l].error));
  return r;
}

}  // namespace pulsefront
