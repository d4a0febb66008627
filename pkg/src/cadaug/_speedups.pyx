# cython: language_level=3
"""Compiled twin of ``_kernel_py``: same functions, same semantics.

Keys are packed exponents (21 bits per variable, see _kernel_py); they fit
comfortably in an unsigned 64-bit word, so key arithmetic and the
graded-lex comparisons run as C integer ops.  Coefficients stay Python
objects (int / Fraction) because exact arithmetic needs arbitrary
precision.
"""

from libc.stdlib cimport free, malloc

from fractions import Fraction

from cadaug._kernel_py import InexactDivision

EXP_BITS = 21
EXP_MASK = (1 << EXP_BITS) - 1
KEY_ONE = {0: 1}

cdef unsigned long long _MASK = (1ULL << 21) - 1ULL


def pack(e1, e2, e3):
    return e1 | (e2 << 21) | (e3 << 42)


def unpack(key):
    cdef unsigned long long k = key
    return (k & _MASK, (k >> 21) & _MASK, k >> 42)


def total_degree(key):
    cdef unsigned long long k = key
    return (k & _MASK) + ((k >> 21) & _MASK) + (k >> 42)


def divides(bkey, akey):
    cdef unsigned long long b = bkey, a = akey
    return (
        (b & _MASK) <= (a & _MASK)
        and ((b >> 21) & _MASK) <= ((a >> 21) & _MASK)
        and (b >> 42) <= (a >> 42)
    )


cdef inline unsigned long long _tdeg(unsigned long long k):
    return (k & _MASK) + ((k >> 21) & _MASK) + (k >> 42)


cdef unsigned long long _lead_key(dict a) except? 0:
    cdef unsigned long long best = 0, bd = 0, k, d
    cdef bint first = True
    for kobj in a:
        k = kobj
        d = _tdeg(k)
        if first or d > bd or (d == bd and k > best):
            best = k
            bd = d
            first = False
    return best


def klead(a):
    """Graded-lex leading key of a non-empty term dict."""
    return _lead_key(<dict> a)


def kadd(a, b):
    cdef dict da = <dict> a, db = <dict> b, out
    if len(da) < len(db):
        da, db = db, da
    out = dict(da)
    for k, c in db.items():
        cur = out.get(k)
        if cur is None:
            out[k] = c
        else:
            s = cur + c
            if s:
                out[k] = s
            else:
                del out[k]
    return out


def ksub(a, b):
    cdef dict out = dict(<dict> a)
    for k, c in (<dict> b).items():
        cur = out.get(k)
        if cur is None:
            out[k] = -c
        else:
            s = cur - c
            if s:
                out[k] = s
            else:
                del out[k]
    return out


def kneg(a):
    cdef dict out = {}
    for k, c in (<dict> a).items():
        out[k] = -c
    return out


def kscale(a, c):
    if not c:
        return {}
    cdef dict out = {}
    for k, v in (<dict> a).items():
        out[k] = v * c
    return out


def kmul(a, b):
    cdef dict da = <dict> a, db = <dict> b
    if not da or not db:
        return {}
    if len(da) < len(db):
        da, db = db, da
    cdef Py_ssize_t na = len(da), nb = len(db), i, j
    cdef unsigned long long *akeys = <unsigned long long *> malloc(na * sizeof(unsigned long long))
    cdef unsigned long long *bkeys = <unsigned long long *> malloc(nb * sizeof(unsigned long long))
    if akeys == NULL or bkeys == NULL:
        free(akeys)
        free(bkeys)
        raise MemoryError()
    cdef list acoeffs = [None] * na, bcoeffs = [None] * nb
    cdef dict out = {}
    cdef unsigned long long k
    i = 0
    for kobj, c in da.items():
        akeys[i] = kobj
        acoeffs[i] = c
        i += 1
    j = 0
    for kobj, c in db.items():
        bkeys[j] = kobj
        bcoeffs[j] = c
        j += 1
    try:
        for j in range(nb):
            cb = bcoeffs[j]
            for i in range(na):
                k = akeys[i] + bkeys[j]
                p = acoeffs[i] * cb
                cur = out.get(k)
                if cur is None:
                    out[k] = p
                else:
                    s = cur + p
                    if s:
                        out[k] = s
                    else:
                        del out[k]
    finally:
        free(akeys)
        free(bkeys)
    return out


cdef object _coeff_div(object a, object b):
    cdef object q, r
    if type(a) is int and type(b) is int:
        q, r = divmod(a, b)
        if r == 0:
            return q
        return Fraction(a, b)
    q = Fraction(a) / Fraction(b)
    if q.denominator == 1:
        return q.numerator
    return q


def kdiv_exact(a, b):
    """Divide a by b in the polynomial ring; raise InexactDivision otherwise."""
    cdef dict da = <dict> a, db = <dict> b
    if not db:
        raise ZeroDivisionError("division by the zero polynomial")
    if not da:
        return {}
    cdef dict out = {}, rem
    cdef unsigned long long bk, rk, qk, k
    if len(db) == 1:
        for bkobj, bc in db.items():
            bk = bkobj
            for kobj, c in da.items():
                k = kobj
                if not (
                    (bk & _MASK) <= (k & _MASK)
                    and ((bk >> 21) & _MASK) <= ((k >> 21) & _MASK)
                    and (bk >> 42) <= (k >> 42)
                ):
                    raise InexactDivision("monomial does not divide term")
                out[k - bk] = _coeff_div(c, bc)
        return out
    bk = _lead_key(db)
    bc = db[bk]
    rem = dict(da)
    while rem:
        rk = _lead_key(rem)
        if not (
            (bk & _MASK) <= (rk & _MASK)
            and ((bk >> 21) & _MASK) <= ((rk >> 21) & _MASK)
            and (bk >> 42) <= (rk >> 42)
        ):
            raise InexactDivision("leading term not divisible")
        qk = rk - bk
        qc = _coeff_div(rem[rk], bc)
        out[qk] = qc
        for kobj, c in db.items():
            k = <unsigned long long> kobj + qk
            cur = rem.get(k)
            if cur is None:
                rem[k] = -c * qc
            else:
                s = cur - c * qc
                if s:
                    rem[k] = s
                else:
                    del rem[k]
    return out
