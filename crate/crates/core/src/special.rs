//! Power-law tail sums.

/// `B_{2j} / (2j)!` for j = 1..=6.
const EULER_MACLAURIN: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
];

/// `Σ_{k ≥ start} k^{-s}` for `s > 1`, `start ≥ 1` (the Hurwitz zeta function at integer offset).
///
/// The first few terms are summed directly and the remainder from `k = 16` on is
/// closed with an Euler-Maclaurin expansion, accurate to a few ulps.
pub fn zeta_tail(s: f64, start: u64) -> f64 {
    assert!(s > 1.0, "zeta_tail requires s > 1, got {s}");
    let start = start.max(1);
    let cut = start.max(16);
    let direct: f64 = (start..cut).rev().map(|k| (k as f64).powf(-s)).sum();

    let m = cut as f64;
    let mut rem = m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s);
    // rising factorial s(s+1)...(s+2j-2) times m^{-s-2j+1}
    let mut factor = s * m.powf(-s - 1.0);
    for (j, b) in EULER_MACLAURIN.iter().enumerate() {
        rem += b * factor;
        let base = s + (2 * j) as f64;
        factor *= (base + 1.0) * (base + 2.0) / (m * m);
    }
    direct + rem
}
