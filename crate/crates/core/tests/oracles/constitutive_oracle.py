"""Independent high-precision oracle for frozen test values.

Uses mpmath with the full index form of the elasticity tensor, and
numerical quadrature for the stored energy. Nothing here shares code
with the Rust implementation.

    python3 constitutive_oracle.py
"""
import mpmath as mp

mp.mp.dps = 40


def elastic(mu, lam, gamma, m, eps):
    d = lambda i, j: 1 if i == j else 0
    out = [[mp.mpf(0)] * 2 for _ in range(2)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    c = mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k)) + lam * d(i, j) * d(k, l)
                    c += gamma * m[i] * m[j] * m[k] * m[l]
                    out[i][j] += c * eps[k][l]
    return out


def inner(a, b):
    return sum(a[i][j] * b[i][j] for i in range(2) for j in range(2))


def psi(alpha, beta, s):
    return (1 - (beta * s) ** alpha) ** (-1 / mp.mpf(alpha))


def energy(alpha, beta, s):
    return mp.quad(lambda t: t * psi(alpha, beta, t), [0, s])


def main():
    one = mp.mpf(1)
    print("psi(2, 0.5, 1)        =", mp.nstr(psi(2, mp.mpf("0.5"), one), 20))
    print("W(2, 0.5, s=1)        =", mp.nstr(energy(2, mp.mpf("0.5"), one), 20))

    eps = [[mp.mpf("-0.1"), 0], [0, mp.mpf("-0.1")]]
    e = elastic(one, one, 0, [0, 0], eps)
    s = mp.sqrt(inner(eps, e))
    ps = psi(2, mp.mpf("0.1"), s)
    print("stress example: s     =", mp.nstr(s, 20))
    print("                psi   =", mp.nstr(ps, 20))
    print("                sig_xx=", mp.nstr(ps * e[0][0], 20))

    # Homogeneous uniaxial compression: eps_yy = -c, sigma_xx = 0
    for (mu, lam, alpha, beta, c) in [(1, 1, 2, "0.1", "0.1"), (1, 1, 2, "0.5", "0.1")]:
        mu, lam, beta, c = mp.mpf(mu), mp.mpf(lam), mp.mpf(beta), mp.mpf(c)
        # solve sigma_xx(eps_xx) = 0 by root finding on the full nonlinear law
        def sxx(exx):
            eps = [[exx, 0], [0, -c]]
            e = elastic(mu, lam, 0, [0, 0], eps)
            return psi(alpha, beta, mp.sqrt(inner(eps, e))) * e[0][0]
        exx = mp.findroot(sxx, mp.mpf("0.03"))
        eps = [[exx, 0], [0, -c]]
        e = elastic(mu, lam, 0, [0, 0], eps)
        s = mp.sqrt(inner(eps, e))
        ps = psi(alpha, beta, s)
        print(f"homogeneous mu={mu} lam={lam} alpha={alpha} beta={beta} c={c}")
        print("   eps_xx =", mp.nstr(exx, 20))
        print("   s      =", mp.nstr(s, 20))
        print("   psi    =", mp.nstr(ps, 20))
        print("   sig_yy =", mp.nstr(ps * e[1][1], 20))
        print("   W      =", mp.nstr(energy(alpha, beta, s), 20))

    # stored energy close to the strain limit, at the float64 value of u
    u = mp.mpf(0.99999999)
    for alpha in ["0.5", "1.5", "4"]:
        a = mp.mpf(alpha)
        w = mp.quad(lambda t: t * (1 - t ** a) ** (-1 / a), [0, mp.mpf("0.5"), 1 - mp.sqrt(1 - u), u])
        print(f"W(alpha={alpha}, beta=1, s=0.99999999) =", mp.nstr(w, 20))


if __name__ == "__main__":
    main()
