"""High-precision reference values frozen into the C++ unit tests.

Every quantity is computed by direct enumeration of individual outcomes
(no multinomial shortcuts) with 50-digit arithmetic.
"""
import itertools
from mpmath import mp, mpf, power, log, exp

mp.dps = 50


def U(x, g):
    x, g = mpf(x), mpf(g)
    if g == 1:
        return log(x)
    return power(x, 1 - g) / (1 - g)


D = dict(w=mpf(1), p=mpf("0.2"), q=mpf("0.2"), r=mpf("0.03"), a=mpf("0.8"), g=mpf("0.8"),
         d1=mpf("0.1"), d2=mpf("0.05"), c=mpf("0.17"))


def pool_payoff_enum(k, P=D):
    # each member independently hit (prob p) or spared
    total = mpf(0)
    for pattern in itertools.product([0, 1], repeat=k):
        h = sum(pattern)
        prob = power(P["p"], h) * power(1 - P["p"], k - h)
        w = P["w"]
        for hit in pattern:
            if h == 0:
                total += prob * U(w, P["g"])
            elif hit:
                total += prob * U((1 - P["a"]) * w - P["d1"] * w + k * P["d1"] * w / h, P["g"])
            else:
                total += prob * U(w - P["d1"] * w, P["g"])
    return total / k


def index_payoff_enum(l, P=D):
    cats = {"u": P["p"] - P["r"], "v": 1 - P["q"] - P["r"], "m": P["q"] + P["r"] - P["p"], "n": P["r"]}
    w, c, a, d2, g = P["w"], P["c"], P["a"], P["d2"], P["g"]
    total = mpf(0)
    for pattern in itertools.product("uvmn", repeat=l):
        prob = mpf(1)
        for x in pattern:
            prob *= cats[x]
        n = pattern.count("n")
        for x in pattern:
            if n == 0:
                val = U(w - c, g) if x in "uv" else U(w - c + a * w, g)
            else:
                if x in "uv":
                    val = U(w - c - d2 * w, g)
                elif x == "m":
                    val = U(w - c + a * w - d2 * w, g)
                else:
                    val = U((1 - a) * w - c - d2 * w + l * d2 * w / n, g)
            total += prob * val
    return total / l


def loner(P=D):
    return P["p"] * U((1 - P["a"]) * P["w"], P["g"]) + (1 - P["p"]) * U(P["w"], P["g"])


if __name__ == "__main__":
    print("utility(0.2,0.8)", mp.nstr(U("0.2", "0.8"), 20))
    print("Q_S(h=1,k=2)", mp.nstr(U("0.3", "0.8") + U("0.9", "0.8"), 20))
    print("Q_I(l=2,u=2)", mp.nstr(2 * U("0.83", "0.8"), 20))
    print("P_I(l=2,u=1,v=1)", mp.nstr(2 * mpf("0.17") * mpf("0.77"), 20))
    print("loner", mp.nstr(loner(), 20))
    for k in range(1, 5):
        print("pool_payoff", k, mp.nstr(pool_payoff_enum(k), 20))
    for l in range(1, 5):
        print("index_payoff", l, mp.nstr(index_payoff_enum(l), 20))
    # fitness at Z=4, N=2, (iS, iI) = (2, 1): the single co-player is one of {S, I, A}
    print("fS(Z=4,N=2,2,1)", mp.nstr((pool_payoff_enum(2) + 2 * pool_payoff_enum(1)) / 3, 20))
    print("fI(Z=4,N=2,2,1)", mp.nstr(index_payoff_enum(1), 20))
    print("fermi(beta=10, dx=-0.1)", mp.nstr(1 / (1 + exp(mpf(-1))), 20))
