//! Primality testing and factor splitting for 128-bit integers.
//!
//! Small factors are removed by trial division against a sieve of the primes
//! below 10⁶. Cofactors are tested with Miller-Rabin over the first thirteen
//! prime bases, which is deterministic below 3.317·10²⁴; above that bound a
//! strong Lucas test is added (Baillie-PSW). Composite cofactors are split
//! with Brent's variant of Pollard rho. All modular arithmetic runs in
//! Montgomery form so nothing wider than `u128` is needed.

use std::sync::OnceLock;

pub(crate) const TRIAL_LIMIT: u32 = 1_000_000;

/// Thirteen prime bases make Miller-Rabin deterministic below this value.
const MR_DETERMINISTIC_BOUND: u128 = 3_317_044_064_679_887_385_961_981;
const MR_BASES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

pub(crate) fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = TRIAL_LIMIT as usize;
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::with_capacity(80_000);
        for i in 2..=limit {
            if composite[i] {
                continue;
            }
            primes.push(i as u32);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
        primes
    })
}

fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a0, a1) = (a & MASK, a >> 64);
    let (b0, b1) = (b & MASK, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

fn add_mod(a: u128, b: u128, n: u128) -> u128 {
    let (sum, overflow) = a.overflowing_add(b);
    if overflow || sum >= n {
        sum.wrapping_sub(n)
    } else {
        sum
    }
}

fn sub_mod(a: u128, b: u128, n: u128) -> u128 {
    if a >= b {
        a - b
    } else {
        n - (b - a)
    }
}

/// Montgomery arithmetic modulo an odd `n > 1` with `R = 2¹²⁸`.
struct Montgomery {
    n: u128,
    /// `-n⁻¹ mod 2¹²⁸`
    neg_inv: u128,
    /// `R² mod n`
    r2: u128,
    one: u128,
}

impl Montgomery {
    fn new(n: u128) -> Self {
        debug_assert!(n > 1 && n & 1 == 1);
        let mut inv = n;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        let r1 = (u128::MAX % n + 1) % n;
        let mut r2 = r1;
        for _ in 0..128 {
            r2 = add_mod(r2, r2, n);
        }
        Montgomery {
            n,
            neg_inv: inv.wrapping_neg(),
            r2,
            one: r1,
        }
    }

    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.neg_inv);
        let (mh, ml) = mul_wide(m, self.n);
        let carry = lo.overflowing_add(ml).1 as u128;
        let (t, o1) = hi.overflowing_add(mh);
        let (t, o2) = t.overflowing_add(carry);
        if o1 || o2 || t >= self.n {
            t.wrapping_sub(self.n)
        } else {
            t
        }
    }

    fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = mul_wide(a, b);
        self.redc(hi, lo)
    }

    fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.n, self.r2)
    }

    fn from_mont(&self, a: u128) -> u128 {
        self.redc(0, a)
    }

    fn add(&self, a: u128, b: u128) -> u128 {
        add_mod(a, b, self.n)
    }

    fn sub(&self, a: u128, b: u128) -> u128 {
        sub_mod(a, b, self.n)
    }

    fn half(&self, a: u128) -> u128 {
        if a & 1 == 0 {
            a >> 1
        } else {
            // (a + n) / 2 without overflowing
            (a >> 1) + (self.n >> 1) + 1
        }
    }

    fn pow(&self, base: u128, mut exp: u128) -> u128 {
        let mut result = self.one;
        let mut base = base;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        result
    }
}

fn strong_probable_prime(mont: &Montgomery, base: u128) -> bool {
    let n = mont.n;
    let a = base % n;
    if a == 0 {
        return true;
    }
    let minus_one = mont.sub(0, mont.one);
    let twos = (n - 1).trailing_zeros();
    let odd = (n - 1) >> twos;
    let mut x = mont.pow(mont.to_mont(a), odd);
    if x == mont.one || x == minus_one {
        return true;
    }
    for _ in 1..twos {
        x = mont.mul(x, x);
        if x == minus_one {
            return true;
        }
        if x == mont.one {
            return false;
        }
    }
    false
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

fn jacobi(a: i128, n: u128) -> i32 {
    let mut a = if a < 0 {
        let r = a.unsigned_abs() % n;
        if r == 0 {
            0
        } else {
            n - r
        }
    } else {
        a as u128 % n
    };
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        while a & 1 == 0 {
            a >>= 1;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn strong_lucas_probable_prime(mont: &Montgomery) -> bool {
    let n = mont.n;
    if isqrt(n).pow(2) == n {
        return false;
    }
    let mut d: i128 = 5;
    loop {
        let j = jacobi(d, n);
        if j == -1 {
            break;
        }
        if j == 0 && d.unsigned_abs() != n {
            return false;
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let to_residue = |v: i128| -> u128 {
        if v >= 0 {
            v as u128 % n
        } else {
            let r = v.unsigned_abs() % n;
            if r == 0 {
                0
            } else {
                n - r
            }
        }
    };
    let q = (1 - d) / 4;
    let dm = mont.to_mont(to_residue(d));
    let qm = mont.to_mont(to_residue(q));

    let Some(delta) = n.checked_add(1) else {
        // n = 2¹²⁸ - 1 is divisible by 3 and never reaches this test.
        return false;
    };
    let twos = delta.trailing_zeros();
    let odd = delta >> twos;

    // P = 1 throughout.
    let mut u = mont.one;
    let mut v = mont.one;
    let mut qk = qm;
    let bits = 128 - odd.leading_zeros();
    for i in (0..bits - 1).rev() {
        u = mont.mul(u, v);
        v = mont.sub(mont.mul(v, v), mont.add(qk, qk));
        qk = mont.mul(qk, qk);
        if (odd >> i) & 1 == 1 {
            let new_u = mont.half(mont.add(u, v));
            let new_v = mont.half(mont.add(mont.mul(dm, u), v));
            u = new_u;
            v = new_v;
            qk = mont.mul(qk, qm);
        }
    }
    if u == 0 || v == 0 {
        return true;
    }
    for _ in 1..twos {
        v = mont.sub(mont.mul(v, v), mont.add(qk, qk));
        qk = mont.mul(qk, qk);
        if v == 0 {
            return true;
        }
    }
    false
}

pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &small_primes()[..64] {
        let p = p as u128;
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mont = Montgomery::new(n);
    if !MR_BASES.iter().all(|&b| strong_probable_prime(&mont, b)) {
        return false;
    }
    n < MR_DETERMINISTIC_BOUND || strong_lucas_probable_prime(&mont)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Finds a nontrivial factor of an odd composite `n` that has no prime
/// factor below the trial-division limit.
pub(crate) fn pollard_brent(n: u128) -> u128 {
    let mont = Montgomery::new(n);
    let mut c_seed: u128 = 1;
    loop {
        let c = mont.to_mont(c_seed);
        let f = |x: u128| mont.add(mont.mul(x, x), c);
        let mut y = mont.to_mont(2);
        let mut x = y;
        let mut ys = y;
        let mut r: u64 = 1;
        let mut q = mont.one;
        let mut g = 1;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mont.mul(q, mont.sub(x, y));
                }
                g = gcd(mont.from_mont(q), n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(mont.from_mont(mont.sub(x, ys)), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c_seed += 1;
    }
}

/// Splits a cofactor free of primes below the trial limit into primes,
/// appending them (unsorted, with repetition) to `out`.
pub(crate) fn split_large(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    let limit = TRIAL_LIMIT as u128;
    if n < limit * limit || is_prime(n) {
        out.push(n);
        return;
    }
    let f = pollard_brent(n);
    split_large(f, out);
    split_large(n / f, out);
}
