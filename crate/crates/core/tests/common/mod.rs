#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinboson::boson::BosonSymbol;
use spinboson::exact::{gaussian, int, ratio, rational_to_f64, real};
use spinboson::spin::{SpinLetter, SpinPolynomial, SpinWord};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let mut num = rng.gen_range(-6..=6);
    if num == 0 {
        num = 1;
    }
    ratio(num, rng.gen_range(1..=4))
}

pub fn random_word(rng: &mut ChaCha8Rng, len: usize, letters: &[SpinLetter]) -> SpinWord {
    SpinWord::new((0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect::<Vec<_>>())
}

/// A few terms with word length `≤ max_degree` and Gaussian-rational coefficients.
pub fn random_polynomial(rng: &mut ChaCha8Rng, max_degree: usize, letters: &[SpinLetter], complex: bool) -> SpinPolynomial {
    let mut p = SpinPolynomial::zero();
    for _ in 0..rng.gen_range(1..=5) {
        let len = rng.gen_range(0..=max_degree);
        let w = random_word(rng, len, letters);
        let c = if complex && rng.gen_bool(0.3) {
            gaussian(small_rational(rng), small_rational(rng))
        } else {
            real(small_rational(rng))
        };
        p.add_term(w, c);
    }
    p
}

pub const ALL_LETTERS: [SpinLetter; 3] = [SpinLetter::Plus, SpinLetter::Minus, SpinLetter::Z];

/// Random symbol of total degree `≤ max_degree` with at least one diagonal
/// term of degree `≥ 4`. Diagonal coefficients are positive so that the
/// leading `1/N` corrections of the spin side cannot cancel.
pub fn random_symbol(rng: &mut ChaCha8Rng, max_degree: u32) -> BosonSymbol {
    let mut s = BosonSymbol::zero();
    let k = rng.gen_range(2..=max_degree / 2);
    s.add_term(k, k, real(ratio(rng.gen_range(1..=6), rng.gen_range(1..=3))));
    for _ in 0..rng.gen_range(1..=4) {
        let m = rng.gen_range(0..=max_degree);
        let n = rng.gen_range(0..=max_degree - m);
        let c = if m == n {
            ratio(rng.gen_range(1..=6), rng.gen_range(1..=3))
        } else {
            small_rational(rng)
        };
        s.add_term(m, n, real(c));
    }
    s
}

/// `Σ c_mn z*^m zⁿ ↦ Σ c_mn S+^m S-^n` (normal-ordered spin words).
pub fn symbol_as_spin(sym: &BosonSymbol) -> SpinPolynomial {
    let mut p = SpinPolynomial::zero();
    for (&(m, n), c) in sym.terms() {
        let mut letters = vec![SpinLetter::Plus; m as usize];
        letters.extend(vec![SpinLetter::Minus; n as usize]);
        p.add_term(SpinWord::new(letters), c.clone());
    }
    p
}

pub fn monomial(letter: SpinLetter, power: u32) -> SpinPolynomial {
    SpinPolynomial::word(vec![letter; power as usize])
}

pub fn x_power(power: u32) -> SpinPolynomial {
    SpinPolynomial::sx().pow(power)
}

pub fn one() -> BigRational {
    int(1)
}

/// Applies a collective letter to a dense product-basis vector; bit `i` set
/// means site `i` is up.
fn apply_letter(n: u32, letter: SpinLetter, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (s, &a) in v.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        match letter {
            SpinLetter::Z => {
                let up = s.count_ones() as f64;
                out[s] += a * (up - (n as f64 - up)) / 2.0;
            }
            SpinLetter::Plus => {
                for i in 0..n {
                    if s & (1 << i) == 0 {
                        out[s | (1 << i)] += a;
                    }
                }
            }
            SpinLetter::Minus => {
                for i in 0..n {
                    if s & (1 << i) != 0 {
                        out[s & !(1 << i)] += a;
                    }
                }
            }
        }
    }
    out
}

/// Dense matrix of a real spin polynomial with the `1/√N` per letter scaling.
pub fn dense_matrix(n: u32, poly: &SpinPolynomial) -> DMatrix<f64> {
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut e = vec![0.0; dim];
        e[col] = 1.0;
        for (w, c) in poly.terms() {
            assert!(c.im == num::Zero::zero(), "dense helper takes real coefficients");
            let mut v = e.clone();
            // rightmost letter acts first
            for &l in w.letters().iter().rev() {
                v = apply_letter(n, l, &v);
            }
            let scale = rational_to_f64(&c.re) / (n as f64).powf(w.len() as f64 / 2.0);
            for (row, x) in v.iter().enumerate() {
                m[(row, col)] += scale * x;
            }
        }
    }
    m
}

/// `tr[e^{−H/kT} P] / tr[e^{−H/kT}]` for `H = (γ/N)(S+S- + S-S+)` by dense
/// diagonalization in binary64.
pub fn dense_xy_expectation(n: u32, g: f64, poly: &SpinPolynomial) -> f64 {
    let dim = 1usize << n;
    // H/kT = (g/N)(S+S- + S-S+), unscaled letters
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..dim {
        h[(s, s)] += n as f64;
        for i in 0..n {
            for j in 0..n {
                let (bi, bj) = (1usize << i, 1usize << j);
                // s+_i s-_j + s-_i s+_j for i ≠ j
                if i != j && s & bi == 0 && s & bj != 0 {
                    h[((s | bi) & !bj, s)] += 2.0;
                }
            }
        }
    }
    h *= g / n as f64;
    let eig = SymmetricEigen::new(h);
    let weights = eig.eigenvalues.map(|e| (-e).exp());
    let rho = &eig.eigenvectors * DMatrix::from_diagonal(&weights) * eig.eigenvectors.transpose();
    let p = dense_matrix(n, poly);
    (&rho * p).trace() / rho.trace()
}
