"""Independent symbolic derivation of the reference numbers frozen into the tests.

Run ``python3 tools/derive_oracles.py``; it needs sympy but not kahlerlift.
Everything here is computed from scratch (metrics written out by hand,
curvature by the textbook coordinate formulas), so agreement with the
package is a genuine cross-check rather than a re-run of the same code.
"""

import sympy as sp

x, y, u, v, p1, p2 = sp.symbols("x y u v p1 p2", real=True)


def christoffel(g, coords):
    n = len(coords)
    ginv = g.inv()
    return [[[sp.simplify(sum(ginv[k, l] * (sp.diff(g[l, i], coords[j]) + sp.diff(g[l, j], coords[i])
                                             - sp.diff(g[i, j], coords[l])) for l in range(n)) / 2)
              for j in range(n)] for i in range(n)] for k in range(n)]


def riemann_down(g, coords):
    """Rm_ijkl = -g(R(d_i, d_j) d_k, d_l) with R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]."""
    n = len(coords)
    gam = christoffel(g, coords)

    def r13(i, j, k, l):  # R(d_i, d_j) d_k = r13 d_l
        val = sp.diff(gam[l][j][k], coords[i]) - sp.diff(gam[l][i][k], coords[j])
        val += sum(gam[l][i][m] * gam[m][j][k] - gam[l][j][m] * gam[m][i][k] for m in range(n))
        return val

    R = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    R[i, j, k, l] = -sum(r13(i, j, k, m) * g[m, l] for m in range(n))
    return R


def scalar(g, coords):
    n = len(coords)
    R = riemann_down(g, coords)
    ginv = g.inv()
    ric = sp.Matrix(n, n, lambda i, j: sum(ginv[k, l] * R[i, k, j, l] for k in range(n) for l in range(n)))
    return sp.simplify(sum(ginv[i, j] * ric[i, j] for i in range(n) for j in range(n)))


def main():
    # 1. Taylor data of a two-variable function.
    f = sp.exp(x * y) * sp.sin(x) + 1 / (1 + x**2 + y**2)
    pt = {x: sp.Rational(3, 10), y: sp.Rational(-7, 10)}
    print("f partials at (0.3,-0.7):")
    for a in range(4):
        for b in range(4 - a):
            print(f"  d^{a}x d^{b}y:", sp.N(sp.diff(f, x, a, y, b).subs(pt), 20))

    # 2. derivatives of 1/(1+x^2) at x = 1
    h = 1 / (1 + x**2)
    print("1/(1+x^2) derivatives at 1:", [sp.diff(h, x, k).subs(x, 1) for k in range(4)])

    # 3. sphere(1) in the stereographic chart
    lam = 4 / (1 + x**2 + y**2) ** 2
    gs = sp.diag(lam, lam)
    gam = christoffel(gs, [x, y])
    print("sphere Gamma^0_00, Gamma^1_01 at (0.3, 0):",
          sp.N(gam[0][0][0].subs({x: sp.Rational(3, 10), y: 0}), 20),
          sp.N(gam[1][0][1].subs({x: sp.Rational(3, 10), y: 0}), 20))
    print("sphere Scal:", scalar(gs, [x, y]))

    # 4. de Sitter null chart g = 2F du dv, F = 2/(1+uv)^2
    F = 2 / (1 + u * v) ** 2
    gd = sp.Matrix([[0, F], [F, 0]])
    print("de_sitter Scal:", scalar(gd, [u, v]))

    # 5. bump and para_bump Gaussian curvature at (0.4, 0.2)
    s = x**2 + y**2
    lb = sp.exp(sp.exp(-s))  # a = 0.5, sigma = 1
    kb = scalar(sp.diag(lb, lb), [x, y]) / 2
    print("bump K(0.4,0.2):", sp.N(kb.subs({x: sp.Rational(2, 5), y: sp.Rational(1, 5)}), 20))
    Fp = sp.exp(sp.exp(-(u**2 + v**2)))
    kp = scalar(sp.Matrix([[0, Fp], [Fp, 0]]), [u, v]) / 2
    print("para_bump K(0.4,0.2):", sp.N(kp.subs({u: sp.Rational(2, 5), v: sp.Rational(1, 5)}), 20))

    # 6. product sphere(1) x -sphere(2): Scal
    lam2 = 4 * 16 / (4 + u**2 + v**2) ** 2
    gp = sp.diag(lam, lam, -lam2, -lam2)
    print("sphere_product Scal:", scalar(gp, [x, y, u, v]))

    # 7. lifted metric over sphere(1), written out by hand:
    #    g~ = K^T (g j) Pi - Pi^T (g j) K with K = [Gamma(., xi), I], j = [[0,1],[-1,0]]
    coords = [x, y, p1, p2]
    j = sp.Matrix([[0, 1], [-1, 0]])
    G = [[[gam[k][i][jj] for jj in range(2)] for i in range(2)] for k in range(2)]
    xi = [p1, p2]
    gx = sp.Matrix(2, 2, lambda k, i: sum(G[k][i][m] * xi[m] for m in range(2)))
    Pi = sp.Matrix.hstack(sp.eye(2), sp.zeros(2, 2))
    K = sp.Matrix.hstack(gx, sp.eye(2))
    gj = gs * j
    gt = sp.simplify(K.T * gj * Pi - Pi.T * gj * K)
    R = riemann_down(gt, coords)
    at = {x: sp.Rational(3, 10), y: sp.Rational(-1, 5), p1: sp.Rational(1, 2), p2: sp.Rational(-1, 4)}
    for idx in [(0, 1, 0, 1), (0, 1, 0, 3), (0, 2, 1, 3), (0, 1, 2, 3)]:
        print(f"T(sphere) Rm~{idx} at {tuple(at.values())}:", sp.N(R[idx].subs(at), 20))


if __name__ == "__main__":
    main()
