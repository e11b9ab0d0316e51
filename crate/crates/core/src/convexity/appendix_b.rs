//! The polynomial and radical functions behind `I₀ > 0` at `h = −2`, their
//! positivity checked on dense grids, and a transcription self-test that
//! re-expands every factored form.
//!
//! Coordinates: `s₁ = 1 + c²s₂²` parametrizes the first-quadrant Hill block by
//! `(s₂, c) ∈ [0, 1] × [0, √(17/14)]`; `l₂ = s₂²`, `c₁ = c²`, and `v` is the
//! affine variable noted at each rescaled form.

use super::copenhagen::{copenhagen_model, d_of, shat1, shat2};
use super::nonconvex::{g2, g2_gap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

// Coefficient lists, constant term first.
pub const K1: [f64; 16] = [
    72688.0, -111982.0, 188800.0, -349002.0, 1552416.0, -3429694.0, 2538200.0, -768657.0, 642128.0,
    53009.0, 33152.0, 4267.0, -896.0, 3784.0, 8704.0, -128.0,
];
pub const K2: [f64; 16] = [
    -165200.0, 223492.0, -377600.0, 991280.0, -1742336.0, 3920764.0, -5570360.0, 5195743.0,
    -2587792.0, -319833.0, 33152.0, -17470.0, 2176.0, -3088.0, 0.0, -1088.0,
];
pub const K3: [f64; 14] = [
    132160.0, -223964.0, 377600.0, -539456.0, 779872.0, -2021770.0, 3175040.0, -3205287.0,
    1464320.0, 236090.0, -80512.0, 11504.0, 0.0, -5440.0,
];
pub const K5: [f64; 16] = [
    99120.0, -224436.0, 377600.0, -87632.0, -182592.0, -122776.0, 779720.0, -1214831.0, 340848.0,
    152347.0, -127872.0, 5538.0, 2176.0, -13968.0, 0.0, -1088.0,
];
const H2_INNER: [f64; 7] = [2368.0, -151.0, -128.0, 160.0, -512.0, 48.0, -256.0];
pub const H3: [f64; 17] = [
    6608.0, -22538.0, 37760.0, 43056.0, -471552.0, 1083859.0, -667488.0, -22371.0, 53248.0,
    -57015.0, 52096.0, -1459.0, -896.0, 5440.0, -3584.0, 624.0, 1088.0,
];
pub const H4: [f64; 12] = [
    99120.0, -111746.0, 188800.0, -709972.0, -272752.0, 2377365.0, -2809728.0, 2257746.0,
    -1074240.0, 129136.0, 0.0, 7616.0,
];
pub const H5: [f64; 10] = [
    39648.0, -22302.0, 37760.0, -407878.0, 259440.0, 725190.0, -2140416.0, 3019152.0, -1440000.0,
    27200.0,
];
pub const H6: [f64; 8] = [6608.0, 0.0, 0.0, -89964.0, 76160.0, 34272.0, 0.0, 15232.0];
pub const D1: [f64; 31] = [
    1171163506.0,
    -7471707255.0,
    16174395360.0,
    8922925732.0,
    -44809560461.0,
    -33799370597.0,
    45096619475.0,
    78595290662.0,
    37015742898.0,
    -14346554736.0,
    -29900538237.0,
    -19491958537.0,
    -6963317252.0,
    -1208863632.0,
    45920428.0,
    44662945.0,
    -18645624.0,
    -19608465.0,
    -8327827.0,
    -2388872.0,
    -519800.0,
    -89861.0,
    -12669.0,
    -1482.0,
    -145.0,
    -12.0,
    -1.0,
    -1.0,
    -1.0,
    -1.0,
    -1.0,
];
pub const E0: [f64; 9] = [
    -187055.0, -163474.0, 2863736.0, -6584384.0, 6310408.0, -2469888.0, 98304.0, 131072.0, -16384.0,
];
const J21: [f64; 5] = [6923.0, -26216.0, 27024.0, 19712.0, 4736.0];
const J22: [f64; 5] = [803.0, -1862.0, 524.0, 2656.0, 640.0];
const J23: [f64; 5] = [1505.0, -6794.0, 8484.0, 4192.0, 192.0];
const J24: [f64; 5] = [905.0 / 4.0, 364.0, -1728.0, 1152.0, 256.0];
const J25: [f64; 6] = [3713.0 / 4.0, -4568.0, 6232.0, 2688.0, -960.0, -256.0];
const G0: [f64; 5] = [-17.0, -8.0, 40.0, 0.0, -8.0];
const G4: [f64; 7] = [16.0, 32.0, 64.0, -22.0, -23.0, 2.0, 1.0];

/// Upper end `√(17/14)` of the `c` range.
pub fn c_max() -> f64 {
    (17.0f64 / 14.0).sqrt()
}

// ---- functions of (s₂, c) ----

pub fn j0(s2: f64, c: f64) -> f64 {
    let w = c * c * s2 * s2;
    7.0 + 40.0 * w - 8.0 * w * w - 32.0 * w.powi(3) - 8.0 * w.powi(4)
}

pub fn j1(s2: f64) -> f64 {
    let l = s2 * s2;
    85.0 - 26.0 * l + l * l - (17.0 - l) * (1.0 - l).sqrt() * (17.0 - l).sqrt()
}

pub fn j2_squared(s2: f64, c: f64) -> f64 {
    let (l, c2) = (s2 * s2, c * c);
    (2.0 + c2 * l)
        * (17.0 - 14.0 * c2 - l - 11.0 * c2 * c2 * l
            + 4.0 * c2.powi(3) * l * l
            + c2.powi(4) * l.powi(3))
}

pub fn j2(s2: f64, c: f64) -> f64 {
    j2_squared(s2, c).sqrt()
}

pub fn j3(s2: f64, c: f64) -> f64 {
    let w = c * c * s2 * s2;
    (-14.0 + 3.0 * w + w * w) * (1.0 + w).powi(2)
}

pub fn j4(s2: f64, c: f64) -> f64 {
    let w = c * c * s2 * s2;
    horner(&[70.0, 18.0, -105.0, -74.0, 2.0, 8.0, 1.0], w)
}

/// Upper bound `j₂,₀ ≥ |j₂|`.
pub fn j20(s2: f64, c: f64) -> f64 {
    let (l, c2) = (s2 * s2, c * c);
    169.0 / 32.0 - (c2 - 0.25) * (2.5 + l / 4.0 + c2) - c2 * c2 * l / 2.0
}

/// `16D(s₂)`.
pub fn d16(s2: f64) -> f64 {
    16.0 * d_of(s2)
}

pub fn d_minus(s2: f64) -> f64 {
    let l = s2 * s2;
    -17.0 - 8.0 * l * l + 40.0 * l - 4.0 * l * (33.0 / 8.0 - (2.0 * l + l * l))
}

pub fn d_plus(s2: f64) -> f64 {
    let l = s2 * s2;
    -17.0 - 8.0 * l * l + 40.0 * l - 4.0 * l * (1.0 - l) * (4.0 + 2.0 * l + l * l)
}

/// `16c₋₁` in `(s₂, c)`.
pub fn c_minus_one16(s2: f64, c: f64) -> f64 {
    let l = s2 * s2;
    j0(s2, c) - 4.0 * c * l * (1.0 + c * c * l) * j2(s2, c)
}

pub fn w3(s2: f64, c: f64) -> f64 {
    j3(s2, c) * j2(s2, c) + c * j4(s2, c)
}

/// `E₁ = j₁c₋₁ − c³ D W₃`, with `64c₋₁I₀ = s₂⁴E₁`.
pub fn e1(s2: f64, c: f64) -> f64 {
    j1(s2) * c_minus_one16(s2, c) / 16.0 - c.powi(3) * d_of(s2) * w3(s2, c)
}

/// Lower bound `E₂ ≤ 16E₁` on `Ω`.
pub fn e2(s2: f64, c: f64) -> f64 {
    let l = s2 * s2;
    let j20 = j20(s2, c);
    59.0 / 4.0 * (j0(s2, c) - 4.0 * c * l * (1.0 + c * c * l) * j20)
        - c.powi(3) * d_minus(s2) * j3(s2, c) * j20
        - c.powi(4) * d_plus(s2) * j4(s2, c)
}

// ---- functions of (l₂, c) and c ----

pub fn k1(c: f64) -> f64 {
    horner(&K1, c)
}
pub fn k2(c: f64) -> f64 {
    horner(&K2, c)
}
pub fn k3(c: f64) -> f64 {
    horner(&K3, c)
}
pub fn k5(c: f64) -> f64 {
    horner(&K5, c)
}
pub fn k5_prime(c: f64) -> f64 {
    horner(&derivative(&K5), c)
}

pub fn e3(l2: f64, c: f64) -> f64 {
    k1(c) * l2 * l2 + k2(c) * l2 + k3(c)
}

pub fn h1(l2: f64, c: f64) -> f64 {
    16.0 * c.powi(11)
        * (1.0 + 32.0 * c - 4.0 * c * c + 256.0 * c.powi(3) - 8.0 * c.powi(4)
            + 32.0 * c.powi(5)
            + 16.0 * c.powi(3) * (8.0 + c * c) * l2)
}
pub fn h2(c: f64) -> f64 {
    8.0 * c.powi(10) * horner(&H2_INNER, c)
}
pub fn h3(c: f64) -> f64 {
    horner(&H3, c)
}
pub fn h4(c: f64) -> f64 {
    horner(&H4, c)
}
pub fn h5(c: f64) -> f64 {
    horner(&H5, c)
}
pub fn h6(c: f64) -> f64 {
    horner(&H6, c)
}

/// `64E₂` written as a sum of terms that are positive when `E₃, h₁…h₆` are.
pub fn e2_expanded64(l2: f64, c: f64) -> f64 {
    let m = 1.0 - l2;
    e3(l2, c) * l2.powi(3) * m
        + h1(l2, c) * l2.powi(7) * m
        + h2(c) * l2.powi(7)
        + h3(c) * l2.powi(6)
        + h4(c) * l2 * l2 * m.powi(4)
        + h5(c) * l2 * m.powi(5)
        + h6(c) * m.powi(6)
        + 10000.0
            * c.powi(4)
            * (3.0 - 5.0 * l2).powi(2)
            * (31.0 * (4.0 - 5.0 * c).powi(2) * l2.powi(4) / 50.0
                + (3.0 - 4.0 * c).powi(2) * m * l2 * l2
                + (1.0 - 2.0 * c).powi(4) * m * l2
                + c.powi(4) * l2.powi(4))
        + 80.0 * c.powi(9) * l2.powi(6) * m
        + 256.0 * c.powi(16) * l2.powi(8) * (1.0 - l2 * l2)
}

/// `4k₁k₃ − k₂²`, the discriminant governing `min_{l₂} E₃`.
pub fn d0(c: f64) -> f64 {
    4.0 * k1(c) * k3(c) - k2(c).powi(2)
}

/// Lower bound of `D₀(2v/5 + 4/5)` with floored coefficients.
pub fn d1(v: f64) -> f64 {
    horner(&D1, v)
}

pub fn e0(s1: f64) -> f64 {
    horner(&E0, s1)
}

/// `256(j₂,₀² − j₂²)` expanded in `(l₂, c₁)`.
pub fn j2_gap_expanded256(l2: f64, c1: f64) -> f64 {
    905.0 / 4.0 + 364.0 * c1 - 1728.0 * c1 * c1
        + 1152.0 * c1.powi(3)
        + 256.0 * c1.powi(4)
        + (701.0 - 5180.0 * c1 + 7960.0 * c1 * c1 + 704.0 * c1.powi(3) + 256.0 * c1.powi(4)) * l2
        + (1.0 + 248.0 * c1 + 832.0 * c1.powi(3) + 64.0 * c1.powi(4)) * l2 * l2
        - 1536.0 * c1.powi(4) * l2.powi(3)
        - 256.0 * c1.powi(5) * l2.powi(4)
}

pub fn j2x(i: usize, c1: f64) -> f64 {
    match i {
        1 => horner(&J21, c1),
        2 => horner(&J22, c1),
        3 => horner(&J23, c1),
        4 => horner(&J24, c1),
        5 => horner(&J25, c1),
        _ => panic!("j2{i} is not defined"),
    }
}

/// `j₂ᵢ` in `v = 14c₁/17 ∈ [0, 1]`, as sums of manifestly non-negative terms.
pub fn j2x_v(i: usize, v: f64) -> f64 {
    let w = 1.0 - v;
    match i {
        1 => {
            w / 49.0
                * (2.0 * v * (96528.0 - 580911.0 * v + 1346231.0 * v * v)
                    + 12000.0 * (3.0 - 10.0 * v).powi(2)
                    + 231227.0 * w.powi(3))
                + 145322731.0 / 2401.0 * v.powi(4)
        }
        2 => {
            v * w / 343.0 * (326193.0 - 1061368.0 * v + 1671464.0 * v * v)
                + 803.0 * w.powi(4)
                + 13113085.0 / 2401.0 * v.powi(4)
        }
        3 => {
            v * w / 343.0 * (58359.0 - 325948.0 * v + 3078524.0 * v * v)
                + 100.0 * (3.0 - 10.0 * v).powi(2)
                + 605.0 * w.powi(4)
                + 21099315.0 / 2401.0 * v.powi(4)
        }
        4 => {
            v * v / 9604.0 * (4183326.0 - 8388128.0 * v + 7465427.0 * v * v)
                + 100.0 * v * (3.0 - 5.0 * v).powi(2)
                + 447.0 * v * w.powi(3)
                + 905.0 / 4.0 * w.powi(4)
        }
        5 => {
            v * v * w * w / 98.0 * (125841.0 + 401512.0 * v)
                + 16643.0 / 28.0 * v * w.powi(4)
                + 67796525.0 / 9604.0 * v.powi(4) * w
                + 100.0 * (3.0 - 10.0 * v).powi(2)
                + 113.0 / 4.0 * w.powi(5)
                + 115642367.0 / 67228.0 * v.powi(5)
        }
        _ => panic!("j2{i} is not defined"),
    }
}

fn g0(s1: f64) -> f64 {
    horner(&G0, s1)
}

fn g4(s1: f64) -> f64 {
    horner(&G4, s1)
}

fn jay(s1: f64) -> f64 {
    (s1 * s1 - 1.0).sqrt() * (26575.0 / 4096.0 + 16.0 * s1 - 17.0 * s1 * s1 + s1.powi(4)).sqrt()
}

// ---- factored displays ----

mod factored {
    fn b(c: f64) -> f64 {
        1.2 - c
    }

    pub fn e3_at_one(c: f64) -> f64 {
        let b = b(c);
        (39648.0 - 28903204136204.0 / 244140625.0 * c + 5470057737716.0 / 48828125.0 * c * c)
            + 1773112492.0 / 78125.0 * c.powi(3) * b * b
            + c.powi(3)
                * b.powi(3)
                * (16976668754.0 / 78125.0
                    + 11890235417.0 / 15625.0 * c
                    + 1721158044.0 / 3125.0 * c * c)
            + c.powi(8)
                * b
                * (36159674.0 / 625.0
                    + 2825154.0 / 125.0 * c
                    + 174859.0 / 25.0 * c * c
                    + 22064.0 / 5.0 * c.powi(3)
                    + 4744.0 * c.powi(4))
            + c * (0.6 - c).powi(2) * (160957143606.0 / 9765625.0 + 104765224976.0 / 390625.0 * c)
            + 8704.0 * c.powi(14)
            - 1216.0 * c.powi(15)
    }

    pub fn minus_k5_prime(c: f64) -> f64 {
        let b = b(c);
        (224436.0 - 39166298761.0 / 40000.0 * c + 8584984187.0 / 8000.0 * c * c)
            + c * c
                * (0.5 - c).powi(2)
                * (296223209.0 / 400.0
                    + 29197057.0 / 20.0 * c
                    + 2934884627.0 / 2500.0 * c * c
                    + b * (433202652.0 / 125.0 * c * c + 5077647.0 / 25.0 * c.powi(3))
                    + 29200428.0 / 25.0 * c.powi(5))
            + 110596281.0 / 100.0 * c * (0.45 - c).powi(2)
            + c.powi(9) * b * (461262.0 / 5.0 + 26112.0 * c)
            + 181584.0 * c.powi(12)
            + 16320.0 * c.powi(14)
    }

    pub fn h3(c: f64) -> f64 {
        let b = b(c);
        (17638696.0 / 625.0
            + 5496536.0 / 125.0 * c
            + 4054798.0 / 25.0 * c * c
            + (487824.0 / 5.0 + 634791.0 * b) * c.powi(3))
            * (0.4 - c).powi(2)
            * b
            + 1799104.0 / 3125.0 * c * b
            + 2.0 * (46460648.0 - 2460625.0 * c) / 78125.0
            + (332348.0 + 145849.0 * c + 50716.0 * c * c) * c.powi(4) * (1.0 - c).powi(4)
            + (1380.0 + 1138.0 * c) * c.powi(10) * (1.0 - c).powi(2)
            + 163.0 * c.powi(11)
            + (3584.0 * b + 1.2) * c.powi(13)
            + 624.0 * c.powi(15)
            + 1088.0 * c.powi(16)
    }

    pub fn h4(c: f64) -> f64 {
        let b = b(c);
        c * (0.7 - c).powi(2)
            * (32498403269.0 / 125000.0
                + b * (55874294.0 / 3125.0
                    + 183617569.0 / 250.0 * c
                    + 114118354.0 / 125.0 * c * c
                    + 1436406.0 / 25.0 * c * c * b
                    + (2917616.0 / 5.0 + 129136.0 * b) * c.powi(4)))
            + (99120.0 - 3120663099669.0 / 12500000.0 * c + 99820440049.0 / 625000.0 * c * c)
            + 7616.0 * c.powi(11)
    }

    pub fn h5(c: f64) -> f64 {
        let b = b(c);
        c * (0.65 - c).powi(2)
            * (3703539883.0 / 40000.0
                + b * (92744181.0 / 1000.0
                    + 52681943.0 / 100.0 * c
                    + 3077836.0 / 5.0 * c * c
                    + 503940.0 * c.powi(3)
                    + 1404640.0 * c.powi(4))
                + 27200.0 * c.powi(6))
            + 22592124459.0 / 80000000.0
            + 489006553.0 * c / 3200000.0
            + 3744646701.0 / 50000.0 * (0.725 - c).powi(2)
    }

    pub fn h6(c: f64) -> f64 {
        c * c
            * (0.6 - c).powi(2)
            * (16305856.0 / 125.0
                + 1268064.0 / 25.0 * c
                + 91392.0 / 5.0 * c * c
                + 15232.0 * c.powi(3))
            + 6039012.0 / 125.0 * c * (0.65 - c).powi(2)
            + (6608.0 - 255148257.0 / 12500.0 * c + 49515186.0 / 3125.0 * c * c)
    }

    pub fn k1(c: f64) -> f64 {
        let b = b(c);
        (581229138.0 / 15625.0 + 500000.0 * c.powi(3) + 63625694.0 / 25.0 * c.powi(4))
            * (0.7 - c).powi(2)
            + 473182277.0 * c / 125.0 * (0.3 - c).powi(2) * (0.9 - c).powi(2)
            + (948554347.0 / 6250.0 + 136241809.0 / 1250.0 * b) * (0.4 - c).powi(2) * b
            + (642128.0 * b.powi(4) + 19273323.0 * c / 5.0 * (0.6 - c).powi(2)) * c * c * b * b
            + c.powi(9)
                * (53009.0 + 33152.0 * c + 4267.0 * c * c - 896.0 * c.powi(3)
                    + 3784.0 * c.powi(4)
                    + 8704.0 * c.powi(5)
                    - 128.0 * c.powi(6))
            + 32652259.0 / 156250.0
            + 15311007.0 / 10000.0 * c
    }

    pub fn k3(c: f64) -> f64 {
        let b = b(c);
        c * c
            * (0.85 - c).powi(2)
            * (2355466141019.0 / 4000000.0
                + 170920469037.0 / 400000.0 * c
                + (3936935827.0 / 5000.0 + 401995653.0 / 1000.0 * b) * c * c
                + 42279081.0 / 25.0 * c.powi(4)
                + (13026.0 / 5.0 + 80512.0 * b) * c.powi(5))
            + 24462722037599.0 / 160000000.0 * c * (0.8 - c).powi(2)
            + 11504.0 * c.powi(11)
            - 5440.0 * c.powi(13)
            + (132160.0 - 80453722037599.0 * c / 250000000.0
                + 314833837847093.0 * c * c / 1600000000.0)
    }

    pub fn d1(v: f64) -> f64 {
        let w = 1.0 - v;
        24063486356113.0 / 320000.0
            + 5194158621777.0 * v / 80000.0
            + (0.5 - v).powi(2)
                * (14476579533567.0 / 16000.0 + 2258156665941.0 / 32.0 * (0.2 - v).powi(2))
            + (0.4 - v).powi(2)
                * (820472989093.0 / 800.0 * w + 587799303261.0 / 8.0 * v * (0.6 - v).powi(2))
            + v.powi(4)
                * (0.5 - v).powi(2)
                * (419040213759.0 / 8.0
                    + w * (147822902909.0 / 2.0
                        + 299960460267.0 / 2.0 * v
                        + 129475910052.0 * v * v
                        + 57564677658.0 * v.powi(3)))
            + v.powi(10)
                * w
                * super::horner(
                    &[
                        27664139421.0,
                        8172180884.0,
                        1208863632.0,
                        0.0,
                        4931817.0,
                        49594762.0,
                        30949138.0,
                        11340673.0,
                        3012846.0,
                        623974.0,
                        104174.0,
                        14313.0,
                    ],
                    v,
                )
            + 40988611.0 * v.powi(14)
            + w * v.powi(22) * super::horner(&[1644.0, 162.0, 17.0, 5.0, 4.0, 3.0, 2.0, 1.0], v)
    }

    pub fn e0(v: f64) -> f64 {
        let t = 1.0 - 2.0 * v;
        -1024.0 * v.powi(3) * t.powi(3) * (5.0 - v) * (13.0 + 2.0 * v)
            - 189054.0 * v * v * t.powi(3)
            - 185596.0 * v.powi(3) * t * t
            - 5817.0 * v * t * t
            - 29434.0 * v * v * t
            - 17665.0 * t * (1.0 - 6.0 * v).powi(2)
            - 162199.0 * v * (4.0 * v - 1.0).powi(2)
    }

    /// `c₋₁(s₁, 1)` squared gap, in `v = s₁ − 1`.
    pub fn c_minus_one_gap(v: f64) -> f64 {
        let w = 1.0 - v;
        49.0 + 48.0 * v
            + 16.0
                * v
                * v
                * (41.0 * w.powi(4)
                    + 7.0 * v * w.powi(5)
                    + 25.0 * w.powi(4) * v * v
                    + 29.0 * v.powi(6)
                    + 13.0 * v * (3.0 - 4.0 * v).powi(2)
                    + w * v.powi(3) * (14.0 - 45.0 * v + 44.0 * v * v))
    }

    pub fn jay_gap(s1: f64) -> f64 {
        (s1 - 1.0).powi(4)
            * (1549675.0 / 4096.0 - 1048977.0 * s1 / 2048.0 + 713883.0 * s1 * s1 / 4096.0)
            + (2.0 - s1).powi(2)
                * (28749.0 / 4096.0 * (6.0 - 5.0 * s1).powi(2) * (s1 - 1.0).powi(2)
                    + 2993.0 / 2048.0 * (7.0 - 6.0 * s1).powi(2) * (s1 - 1.0)
                    + 9.0 / 64.0 * (15.0 - 13.0 * s1).powi(2))
            + 44897.0 / 2048.0 * (2.0 - s1) * (s1 - 1.0).powi(3) * (5.0 - 4.0 * s1).powi(2)
    }

    pub fn j1(s2: f64) -> f64 {
        let l = s2 * s2;
        let k = 17f64.powf(1.5);
        85.0 - k
            + l * (-26.0
                + l
                + (5780.0 - 918.0 * l + 52.0 * l * l - l.powi(3))
                    / (k + (1.0 - l).sqrt() * (17.0 - l).powf(1.5)))
    }

    pub fn d_plus_gap(s2: f64) -> f64 {
        let l = s2 * s2;
        (1.0 - l * l) * (1.0 - 2.0 * l + 6.0 * l * l + 2.0 * l.powi(3) + l.powi(4))
    }

    /// The displayed sum of squares; it equals 64 times the gap.
    pub fn d_minus_gap64(s2: f64) -> f64 {
        let l = s2 * s2;
        l * l / 4.0 * (71.0 - 287.0 * l + 293.0 * l * l)
            + 3.0 * l / 4.0 * (11.0 - 20.0 * l).powi(2)
            + 37.0 * l / 4.0 * (1.0 - l).powi(3)
            + (1.0 - 2.0 * l).powi(2)
    }

    pub fn g2_gap(nu: f64) -> f64 {
        let n2 = nu * nu;
        19433.0 / 256.0 + 123.0 * n2 / 16.0 + 307.0 * n2 * n2 / 8.0 + 51.0 * n2.powi(3)
            - 7.0 * n2.powi(4)
    }

    /// `2²⁰ c₋₁(s₁, 5/8) Ŵ₀(s₁, 5/8, −2)` from the displayed decomposition.
    pub fn e58(s1: f64) -> f64 {
        let q = 100.0 * 41457f64.sqrt();
        let jay = super::jay(s1);
        super::e0(s1)
            + 4.0 * s1 * (q - 20361.0) * jay
            + 4.0
                * s1
                * (4418.0 - 65536.0 * s1 + 69632.0 * s1 * s1 - 4096.0 * s1.powi(4))
                * (jay - (1.25 - 8.0 * (s1 - 1.25).powi(2)))
            + (q - 20360.0) * (17.0 + 8.0 * s1 - 40.0 * s1 * s1 + 8.0 * s1.powi(4))
    }
}

// ---- region membership ----

/// `(s₂, c)` lies in the first-quadrant Hill block at `h = −2`.
pub fn in_h1(s2: f64, c: f64) -> bool {
    let m = copenhagen_model(-2.0);
    let w = c * c * s2 * s2;
    m.potential_s(1.0 + w, s2) <= 1e-15 || s2 == 0.0
}

// ---- report ----

/// A sampled claim: `margin > 0` means it holds at every sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub claim: String,
    pub samples: usize,
    pub margin: f64,
    pub at: Vec<f64>,
    /// `margin / (largest change between neighbouring samples)`.
    pub lipschitz_ratio: Option<f64>,
    pub pass: bool,
}

/// Factored vs expanded form at random points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub points: usize,
    pub max_relative_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixBReport {
    pub resolution: usize,
    pub claims: Vec<Check>,
    pub transcription: Vec<IdentityCheck>,
    pub pass: bool,
}

impl AppendixBReport {
    pub fn claim(&self, name: &str) -> Option<&Check> {
        self.claims.iter().find(|c| c.name == name)
    }

    pub fn identity(&self, name: &str) -> Option<&IdentityCheck> {
        self.transcription.iter().find(|c| c.name == name)
    }
}

pub const IDENTITY_TOL: f64 = 1e-9;
const IDENTITY_POINTS: usize = 20;

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// `f > 0` on a 1-d grid.
fn positive_1d<F: Fn(f64) -> f64 + Sync>(
    name: &str,
    claim: &str,
    lo: f64,
    hi: f64,
    n: usize,
    f: F,
) -> Check {
    let vals: Vec<f64> = grid(lo, hi, n)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&x| f(x))
        .collect();
    let (mut margin, mut at) = (f64::INFINITY, f64::NAN);
    let mut step: f64 = 0.0;
    for (i, &v) in vals.iter().enumerate() {
        if v < margin {
            margin = v;
            at = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        }
        if i > 0 {
            step = step.max((v - vals[i - 1]).abs());
        }
    }
    Check {
        name: name.into(),
        claim: claim.into(),
        samples: n,
        margin,
        at: vec![at],
        lipschitz_ratio: Some(margin / step),
        pass: margin > 0.0,
    }
}

/// `f > 0` on the masked points of a 2-d grid.
#[allow(clippy::too_many_arguments)]
fn positive_2d<F, M>(
    name: &str,
    claim: &str,
    a: (f64, f64),
    b: (f64, f64),
    n: usize,
    mask: M,
    f: F,
) -> Check
where
    F: Fn(f64, f64) -> f64 + Sync,
    M: Fn(f64, f64) -> bool + Sync,
{
    let xs: Vec<f64> = grid(a.0, a.1, n).collect();
    let ys: Vec<f64> = grid(b.0, b.1, n).collect();
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| {
            ys.iter()
                .map(|&y| if mask(x, y) { f(x, y) } else { f64::NAN })
                .collect()
        })
        .collect();
    let (mut margin, mut at) = (f64::INFINITY, vec![f64::NAN; 2]);
    let mut step: f64 = 0.0;
    let mut samples = 0;
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            samples += 1;
            if v < margin {
                margin = v;
                at = vec![xs[i], ys[j]];
            }
            if j > 0 && !row[j - 1].is_nan() {
                step = step.max((v - row[j - 1]).abs());
            }
            if i > 0 && !rows[i - 1][j].is_nan() {
                step = step.max((v - rows[i - 1][j]).abs());
            }
        }
    }
    Check {
        name: name.into(),
        claim: claim.into(),
        samples,
        margin,
        at,
        lipschitz_ratio: Some(margin / step),
        pass: margin > 0.0,
    }
}

fn value_check(name: &str, claim: &str, got: f64, expected: f64, tol: f64) -> Check {
    let margin = tol - (got - expected).abs();
    Check {
        name: name.into(),
        claim: claim.into(),
        samples: 1,
        margin,
        at: vec![got],
        lipschitz_ratio: None,
        pass: margin > 0.0,
    }
}

fn sign_check(name: &str, claim: &str, value: f64, at: f64) -> Check {
    Check {
        name: name.into(),
        claim: claim.into(),
        samples: 1,
        margin: value,
        at: vec![at],
        lipschitz_ratio: None,
        pass: value > 0.0,
    }
}

fn identity<S, L, R>(name: &str, rng: &mut ChaCha8Rng, sample: S, lhs: L, rhs: R) -> IdentityCheck
where
    S: Fn(&mut ChaCha8Rng) -> Vec<f64>,
    L: Fn(&[f64]) -> f64,
    R: Fn(&[f64]) -> f64,
{
    let mut worst: f64 = 0.0;
    for _ in 0..IDENTITY_POINTS {
        let p = sample(rng);
        let (a, b) = (lhs(&p), rhs(&p));
        let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max((a - b).abs() / scale);
    }
    IdentityCheck {
        name: name.into(),
        points: IDENTITY_POINTS,
        max_relative_error: worst,
        pass: worst < IDENTITY_TOL,
    }
}

/// Re-expands every factored display and compares it with the monomial form.
pub fn transcription_self_test(seed: u64) -> Vec<IdentityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cm = c_max();
    let unit = |r: &mut ChaCha8Rng| vec![r.gen::<f64>()];
    let c_range = |r: &mut ChaCha8Rng| vec![r.gen_range(0.0..1.2)];
    let box_lc = move |r: &mut ChaCha8Rng| vec![r.gen::<f64>(), r.gen_range(0.0..cm)];
    let h1_point = move |r: &mut ChaCha8Rng| loop {
        let (s2, c) = (r.gen_range(0.05..1.0), r.gen_range(0.0..cm));
        if in_h1(s2, c) {
            return vec![s2, c];
        }
    };
    let m = copenhagen_model(-2.0);
    let mut out = Vec::new();
    out.push(identity(
        "E2: bound form = expanded form",
        &mut rng,
        box_lc,
        |p| 64.0 * e2(p[0].sqrt(), p[1]),
        |p| e2_expanded64(p[0], p[1]),
    ));
    out.push(identity(
        "k5 = k2 + 2k3",
        &mut rng,
        c_range,
        |p| k5(p[0]),
        |p| k2(p[0]) + 2.0 * k3(p[0]),
    ));
    out.push(identity(
        "E3(1, c) = k1 + k2 + k3",
        &mut rng,
        c_range,
        |p| factored::e3_at_one(p[0]),
        |p| k1(p[0]) + k2(p[0]) + k3(p[0]),
    ));
    out.push(identity(
        "E3 - k3(1-l2)^2 - E3(1,c) l2^2 = l2(1-l2) k5",
        &mut rng,
        |r: &mut ChaCha8Rng| vec![r.gen::<f64>(), r.gen_range(0.0..1.2)],
        |p| {
            let (l, c) = (p[0], p[1]);
            e3(l, c) - k3(c) * (1.0 - l).powi(2) - e3(1.0, c) * l * l
        },
        |p| p[0] * (1.0 - p[0]) * k5(p[1]),
    ));
    out.push(identity(
        "-k5'",
        &mut rng,
        c_range,
        |p| factored::minus_k5_prime(p[0]),
        |p| -k5_prime(p[0]),
    ));
    out.push(identity(
        "h3",
        &mut rng,
        c_range,
        |p| factored::h3(p[0]),
        |p| h3(p[0]),
    ));
    out.push(identity(
        "h4",
        &mut rng,
        c_range,
        |p| factored::h4(p[0]),
        |p| h4(p[0]),
    ));
    out.push(identity(
        "h5",
        &mut rng,
        c_range,
        |p| factored::h5(p[0]),
        |p| h5(p[0]),
    ));
    out.push(identity(
        "h6",
        &mut rng,
        c_range,
        |p| factored::h6(p[0]),
        |p| h6(p[0]),
    ));
    out.push(identity(
        "k1",
        &mut rng,
        c_range,
        |p| factored::k1(p[0]),
        |p| k1(p[0]),
    ));
    out.push(identity(
        "k3",
        &mut rng,
        c_range,
        |p| factored::k3(p[0]),
        |p| k3(p[0]),
    ));
    out.push(identity(
        "D1",
        &mut rng,
        unit,
        |p| factored::d1(p[0]),
        |p| d1(p[0]),
    ));
    out.push(identity(
        "256(j20^2 - j2^2)",
        &mut rng,
        box_lc,
        |p| 256.0 * (j20(p[0].sqrt(), p[1]).powi(2) - j2_squared(p[0].sqrt(), p[1])),
        |p| j2_gap_expanded256(p[0], p[1] * p[1]),
    ));
    out.push(identity(
        "256(j20^2 - j2^2) via j21..j25",
        &mut rng,
        box_lc,
        |p| j2_gap_expanded256(p[0], p[1] * p[1]),
        |p| {
            let (l, c1) = (p[0], p[1] * p[1]);
            let w = 1.0 - l;
            l * w / 2.0 * (l * w * j2x(1, c1) + 4.0 * w * w * j2x(2, c1) + 4.0 * l * l * j2x(3, c1))
                + w.powi(4) * j2x(4, c1)
                + l.powi(4) * j2x(5, c1)
        },
    ));
    for i in 1..=5 {
        out.push(identity(
            &format!("j2{i}(v)"),
            &mut rng,
            unit,
            move |p| j2x(i, 17.0 * p[0] / 14.0),
            move |p| j2x_v(i, p[0]),
        ));
    }
    out.push(identity(
        "d+ gap",
        &mut rng,
        unit,
        |p| {
            let l = p[0] * p[0];
            (1.0 - l) * (17.0 - l) - ((1.0 - l) * (4.0 + 2.0 * l + l * l)).powi(2)
        },
        |p| factored::d_plus_gap(p[0]),
    ));
    out.push(identity(
        "d- gap (x64)",
        &mut rng,
        unit,
        |p| {
            let l = p[0] * p[0];
            64.0 * ((33.0 / 8.0 - (2.0 * l + l * l)).powi(2) - (1.0 - l) * (17.0 - l))
        },
        |p| factored::d_minus_gap64(p[0]),
    ));
    out.push(identity(
        "D' numerator",
        &mut rng,
        unit,
        |p| {
            let l = p[0] * p[0];
            (10.0 - 4.0 * l).powi(2) * (17.0 - l) - (25.0 - 2.0 * l).powi(2) * (1.0 - l)
        },
        |p| {
            let l = p[0] * p[0];
            1075.0 - 735.0 * l + 248.0 * l * l - 12.0 * l.powi(3)
        },
    ));
    out.push(identity(
        "j1 rewrite",
        &mut rng,
        unit,
        |p| j1(p[0]),
        |p| factored::j1(p[0]),
    ));
    out.push(identity(
        "j0 = g0(1 + c^2 s2^2)",
        &mut rng,
        box_lc,
        |p| j0(p[0], p[1]),
        |p| g0(1.0 + p[1] * p[1] * p[0] * p[0]),
    ));
    out.push(identity(
        "j4 = g4(1 + c^2 s2^2)",
        &mut rng,
        box_lc,
        |p| j4(p[0], p[1]),
        |p| g4(1.0 + p[1] * p[1] * p[0] * p[0]),
    ));
    out.push(identity(
        "g4''(1 + v)",
        &mut rng,
        unit,
        |p| horner(&derivative(&derivative(&G4)), 1.0 + p[0]),
        |p| {
            let v = p[0];
            -210.0 - 444.0 * v + 24.0 * v * v + 160.0 * v.powi(3) + 30.0 * v.powi(4)
        },
    ));
    out.push(identity(
        "j2^2 = (2 + c^2 s2^2)(-32 V / s2^2)",
        &mut rng,
        h1_point,
        |p| j2_squared(p[0], p[1]),
        move |p| {
            let w = p[1] * p[1] * p[0] * p[0];
            (2.0 + w) * (-32.0 * m.potential_s(1.0 + w, p[0]) / (p[0] * p[0]))
        },
    ));
    out.push(identity(
        "16 c_{-1}(s2, c)",
        &mut rng,
        h1_point,
        |p| c_minus_one16(p[0], p[1]),
        move |p| 16.0 * m.c_minus_one(1.0 + p[1] * p[1] * p[0] * p[0], p[0]),
    ));
    out.push(identity(
        "64 c_{-1} I0 = s2^4 E1",
        &mut rng,
        h1_point,
        move |p| {
            let s1 = 1.0 + p[1] * p[1] * p[0] * p[0];
            64.0 * m.c_minus_one(s1, p[0]) * m.i0(s1, p[0])
        },
        |p| p[0].powi(4) * e1(p[0], p[1]),
    ));
    out.push(identity(
        "D closed form",
        &mut rng,
        unit,
        |p| d_of(p[0]),
        move |p| m.d_hat(p[0]),
    ));
    out.push(identity(
        "c_{-1}(s1, 1) squared gap",
        &mut rng,
        unit,
        |p| {
            let s1 = 1.0 + p[0];
            (-17.0 - 8.0 * s1 + 40.0 * s1 * s1 - 8.0 * s1.powi(4)).powi(2)
                - 16.0
                    * s1
                    * s1
                    * (s1 * s1 - 1.0)
                    * (16.0 + 16.0 * s1 - 17.0 * s1 * s1 + s1.powi(4))
        },
        |p| factored::c_minus_one_gap(p[0]),
    ));
    out.push(identity(
        "E0(1 + v)",
        &mut rng,
        |r: &mut ChaCha8Rng| vec![r.gen_range(0.0..0.5)],
        |p| e0(1.0 + p[0]),
        |p| factored::e0(p[0]),
    ));
    out.push(identity(
        "J = 4 (s1^2 - 1)^{1/2} r(s1, 5/8)",
        &mut rng,
        |r: &mut ChaCha8Rng| vec![r.gen_range(1.0..1.37)],
        |p| jay(p[0]),
        move |p| 4.0 * (p[0] * p[0] - 1.0).sqrt() * m.r_s(p[0], 0.625),
    ));
    out.push(identity(
        "(5/4 - 8(s1 - 5/4)^2)^2 - J^2",
        &mut rng,
        |r: &mut ChaCha8Rng| vec![r.gen_range(1.0..1.37)],
        |p| (1.25 - 8.0 * (p[0] - 1.25).powi(2)).powi(2) - jay(p[0]).powi(2),
        |p| factored::jay_gap(p[0]),
    ));
    out.push(identity(
        "2^20 c_{-1} W0hat at s2 = 5/8",
        &mut rng,
        |r: &mut ChaCha8Rng| vec![r.gen_range(1.01..1.37)],
        move |p| {
            let s1 = p[0];
            2f64.powi(20) * m.c_minus_one(s1, 0.625) * (m.w0(s1, 0.625) + m.d_hat(0.625))
        },
        |p| factored::e58(p[0]),
    ));
    out.push(identity(
        "G2 gap",
        &mut rng,
        unit,
        |p| g2_gap(p[0]),
        |p| factored::g2_gap(p[0] - 0.5),
    ));
    out
}

/// Grid checks of every sign and monotonicity claim, at `resolution` points per axis.
pub fn appendix_b_suite_with(resolution: usize) -> AppendixBReport {
    appendix_b_suite_seeded(resolution, DEFAULT_SEED)
}

pub const DEFAULT_SEED: u64 = 0x5eed;

/// As [`appendix_b_suite_with`], with the seed of the transcription self-test.
pub fn appendix_b_suite_seeded(resolution: usize, seed: u64) -> AppendixBReport {
    let n = resolution.max(2);
    let cm = c_max();
    let all = |_: f64, _: f64| true;
    let s2hat = shat2();
    let sbar1 = copenhagen_model(-2.0).hill_bound().1;
    let m = copenhagen_model(-2.0);
    let mut claims = vec![
        positive_2d(
            "E2",
            "E2 > 0 on [0,1]×[0,√(17/14)]",
            (0.0, 1.0),
            (0.0, cm),
            n,
            all,
            e2,
        ),
        positive_2d(
            "16E1 - E2",
            "16E1 ≥ E2 on Ω = H1 ∩ {s2 ≤ ŝ2}",
            (0.0, s2hat),
            (0.0, cm),
            n,
            in_h1,
            |s2, c| 16.0 * e1(s2, c) - e2(s2, c),
        ),
        positive_2d("E1", "E1 > 0 on Ω", (0.0, s2hat), (0.0, cm), n, in_h1, e1),
        positive_2d(
            "E3",
            "E3 > 0 on [0,1]×[0,6/5]",
            (0.0, 1.0),
            (0.0, 1.2),
            n,
            all,
            e3,
        ),
        positive_2d(
            "h1/c^11",
            "h1 > 0 on [0,1]×(0,6/5]",
            (0.0, 1.0),
            (0.0, 1.2),
            n,
            all,
            |l2, c| h1(l2, c) / c.powi(11),
        ),
        positive_2d(
            "j20^2 - j2^2",
            "j2,0 > |j2| on [0,1]×[0,√(17/14)]",
            (0.0, 1.0),
            (0.0, cm),
            n,
            all,
            |s2, c| j20(s2, c).powi(2) - j2_squared(s2, c),
        ),
        positive_2d(
            "j20",
            "j2,0 > 0 on [0,1]×[0,√(17/14)]",
            (0.0, 1.0),
            (0.0, cm),
            n,
            all,
            j20,
        ),
        positive_2d("j0", "j0 > 0 on H1", (0.0, 1.0), (0.0, cm), n, in_h1, j0),
        positive_2d(
            "-j3",
            "j3 < 0 on H1",
            (0.0, 1.0),
            (0.0, cm),
            n,
            in_h1,
            |s2, c| -j3(s2, c),
        ),
        positive_2d(
            "j4",
            "j4 > 0 on H1 ∩ {s2 ≤ ŝ2}",
            (0.0, s2hat),
            (0.0, cm),
            n,
            in_h1,
            j4,
        ),
        positive_1d("h2/c^10", "h2 > 0 on (0,6/5]", 0.0, 1.2, n, |c| {
            horner(&H2_INNER, c)
        }),
        positive_1d("h3", "h3 > 0 on [0,6/5]", 0.0, 1.2, n, h3),
        positive_1d("h4", "h4 > 0 on [0,6/5]", 0.0, 1.2, n, h4),
        positive_1d("h5", "h5 > 0 on [0,6/5]", 0.0, 1.2, n, h5),
        positive_1d("h6", "h6 > 0 on [0,6/5]", 0.0, 1.2, n, h6),
        positive_1d("k1", "k1 > 0 on [0,6/5]", 0.0, 1.2, n, k1),
        positive_1d("k3", "k3 > 0 on [0,6/5]", 0.0, 1.2, n, k3),
        positive_1d("E3(1,c)", "E3(1,c) > 0 on [0,6/5]", 0.0, 1.2, n, |c| {
            e3(1.0, c)
        }),
        positive_1d("-k5'", "k5 decreasing on [0,6/5]", 0.0, 1.2, n, |c| {
            -k5_prime(c)
        }),
        positive_1d("k5", "k5 > 0 on [0,4/5]", 0.0, 0.8, n, k5),
        value_check("k5(4/5)", "k5(4/5) = 14698.5", k5(0.8), 14698.5, 0.1),
        positive_1d("D0", "D0 > 0 on [4/5,6/5]", 0.8, 1.2, n, d0),
        positive_1d("D1", "D1 > 0 on [0,1]", 0.0, 1.0, n, d1),
        positive_1d(
            "D0 - D1",
            "D0(2v/5 + 4/5) ≥ D1(v) on [0,1]",
            0.0,
            1.0,
            n,
            |v| {
                // the floored coefficients differ by less than 1 each, far above round-off
                d0(0.4 * v + 0.8) - d1(v) + 1e-3
            },
        ),
    ];
    for i in 1..=5 {
        claims.push(positive_1d(
            &format!("j2{i}"),
            &format!("j2{i} > 0 on v ∈ [0,1]"),
            0.0,
            1.0,
            n,
            move |v| j2x(i, 17.0 * v / 14.0),
        ));
    }
    claims.extend([
        positive_1d(
            "(j1 - j1(0))/s2^2",
            "j1 ≥ 85 − 17^{3/2} on [0,1]",
            0.0,
            1.0,
            n,
            |s2| {
                let l = s2 * s2;
                -26.0
                    + l
                    + (5780.0 - 918.0 * l + 52.0 * l * l - l.powi(3))
                        / (17f64.powf(1.5) + (1.0 - l).sqrt() * (17.0 - l).powf(1.5))
            },
        ),
        value_check(
            "85 - 17^{3/2} - 59/4",
            "85 − 17^{3/2} > 59/4",
            85.0 - 17f64.powf(1.5) - 59.0 / 4.0,
            0.157,
            0.01,
        ),
        positive_1d(
            "(16D - D-)/4s2^2",
            "D− ≤ 16D on (0,1]",
            1.0 / n as f64,
            1.0,
            n,
            |s2| (d16(s2) - d_minus(s2)) / (4.0 * s2 * s2),
        ),
        positive_1d(
            "(D+ - 16D)/4s2^2(1-s2^2)",
            "16D ≤ D+ on (0,1)",
            1.0 / n as f64,
            1.0 - 1.0 / n as f64,
            n,
            |s2| (d_plus(s2) - d16(s2)) / (4.0 * s2 * s2 * (1.0 - s2 * s2)),
        ),
        positive_1d("D'", "D increasing on [0,1]", 0.0, 1.0, n, |s2| {
            let l = s2 * s2;
            1075.0 - 735.0 * l + 248.0 * l * l - 12.0 * l.powi(3)
        }),
        value_check("D(0)", "D(0) = −17/16", d_of(0.0), -17.0 / 16.0, 1e-14),
        value_check("D(1)", "D(1) = 15/16", d_of(1.0), 15.0 / 16.0, 1e-14),
        sign_check("D(0.82)", "D(0.82) > 0", d_of(0.82), 0.82),
        positive_1d(
            "c_{-1}(s1,1)",
            "c−1(s1, 1) > 0 on [1, s̄1]",
            1.0,
            sbar1,
            n,
            move |s1| m.c_minus_one(s1, 1.0),
        ),
        positive_1d(
            "c_{-1}(1,s2) - 7/16",
            "c−1(1, s2) = 7/16 on [0,1]",
            0.0,
            1.0,
            n,
            move |s2| 1e-12 - (m.c_minus_one(1.0, s2) - 7.0 / 16.0).abs(),
        ),
        positive_1d("g0", "g0 > 0 on [1, s̄1]", 1.0, sbar1, n, g0),
        positive_1d("g4", "g4 > 0 on [1, 1.6]", 1.0, 1.6, n, g4),
        positive_1d("-g4''", "g4 concave on [1, 1.6]", 1.0, 1.6, n, |s1| {
            -horner(&derivative(&derivative(&G4)), s1)
        }),
        positive_1d("-E0", "E0 < 0 on [1, 3/2]", 1.0, 1.5, n, |s1| -e0(s1)),
        positive_1d(
            "-W0hat(s1,5/8,-2)",
            "Ŵ0(s1, 5/8, −2) < 0 on (1, ŝ1]",
            1.0 + 1e-9,
            shat1(),
            n,
            move |s1| -(m.w0(s1, 0.625) + m.d_hat(0.625)),
        ),
        positive_1d(
            "G2 gap",
            "(15 − …)² − 16PQ > 0 on (0,1)",
            1.0 / n as f64,
            1.0 - 1.0 / n as f64,
            n,
            g2_gap,
        ),
        positive_2d(
            "-G2",
            "G2 < 0 on (0,1)×[−1,1]",
            (1.0 / n as f64, 1.0 - 1.0 / n as f64),
            (-1.0, 1.0),
            n,
            all,
            |r1, s| -g2(r1, s),
        ),
        value_check(
            "E1(0,0)",
            "E1(0,0) = (119/16)(5 − √17)",
            e1(0.0, 0.0),
            119.0 / 16.0 * (5.0 - 17f64.sqrt()),
            1e-10,
        ),
    ]);
    let transcription = transcription_self_test(seed);
    let pass = claims.iter().all(|c| c.pass) && transcription.iter().all(|c| c.pass);
    AppendixBReport {
        resolution: n,
        claims,
        transcription,
        pass,
    }
}

/// The full suite at 2000 points per axis.
pub fn appendix_b_suite() -> AppendixBReport {
    appendix_b_suite_with(2000)
}
