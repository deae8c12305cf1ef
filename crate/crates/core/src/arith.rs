//! Exact integer arithmetic for fractional powers.
//!
//! Every threshold in this crate has the shape `n^(a/b)` for small integers
//! `a`, `b`. Floating point drifts exactly where it hurts most (perfect
//! powers land on the rounding boundary), so each quantity is defined by an
//! integer predicate and located by binary search:
//!
//! * `floor_root(v, d)` is the largest `x` with `x^d <= v`,
//! * `ceil_root(v, d)` is the smallest `x` with `x^d >= v`.
//!
//! `floor(n^(a/b)) = floor_root(n^a, b)`, and scaled forms follow the same
//! route, e.g. `ceil(2 * n^(3/5)) = ceil_root(32 * n^3, 5)`.

/// True iff `x^d <= v`, without overflow.
fn pow_at_most(x: u128, d: u32, v: u128) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..d {
        acc = match acc.checked_mul(x) {
            Some(a) if a <= v => a,
            _ => return false,
        };
    }
    true
}

/// Largest `x` with `x^d <= v`. For `d >= 2` the result always fits in u64.
///
/// # Panics
///
/// Panics if `d == 0`, or if `d == 1` and `v` does not fit in u64.
pub fn floor_root(v: u128, d: u32) -> u64 {
    assert!(d >= 1, "root degree must be positive");
    if v == 0 {
        return 0;
    }
    if d == 1 {
        return u64::try_from(v).expect("first root must fit in u64");
    }
    // Invariant: lo^d <= v < hi^d. (2^64)^d overflows u128 for d >= 2,
    // so pow_at_most rejects hi.
    let mut lo: u128 = 1;
    let mut hi: u128 = 1 << 64;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pow_at_most(mid, d, v) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo as u64
}

/// Smallest `x` with `x^d >= v`. The result must fit in u64.
pub fn ceil_root(v: u128, d: u32) -> u64 {
    if v == 0 {
        return 0;
    }
    let f = floor_root(v, d);
    if pow_at_most(f as u128, d, v) && (f as u128).pow(d) == v {
        f
    } else {
        f + 1
    }
}

/// Smallest `s` with `s^2 >= n`.
pub fn ceil_sqrt(n: u64) -> u64 {
    ceil_root(n as u128, 2)
}

/// `ceil(a / b)` for positive `b`.
pub fn ceil_div(a: u64, b: u64) -> u64 {
    debug_assert!(b > 0);
    a / b + u64::from(a % b != 0)
}
