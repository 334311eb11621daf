//! The invariant suite behind `divalg verify`.
//!
//! Every property the library promises is encoded as a [`Check`]: a named,
//! seeded routine returning pass/fail, the worst residual it saw and how many
//! cases it tried. Checks are independent, so they run in parallel; each gets
//! its own ChaCha stream derived from the suite seed and its position in the
//! list, and results are reported in declaration order. Nothing in a report
//! depends on timing, which makes reports byte-identical for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    block_of, classical, find_unities, is_morphism, isotope, left_mult, morphism_residual,
    opposite, random_unit_vector, right_mult, sign_pair, transport, Algebra, Classical, Sampling,
    SignPair,
};
use crate::decorated::{functor_i, kappa, same_decorated, transport_decorated, DecoratedAlgebra};
use crate::dim2::{
    build2d, groupoid_hom, hom2d, normal_form_2d, random_normal_form, Group2D, NormalForm2D,
};
use crate::equadratic::{central_idempotents, functor_g, im_e, is_e_quadratic};
use crate::gen::{
    random_decorated, random_division_2d, random_division_algebra, random_e_quadratic,
    random_invertible, random_invertible_signed, random_orthogonal, random_special_orthogonal,
};
use crate::matkit::{norm, polar_decompose, random_spd1_with, sign_det, svd, sym_eigen, Mat, Sign};
use crate::quat::{
    functor_h, k_map, morphism_image, quat_normal_form, so4_factor, z_action, Quat, ZObject,
};

/// Suite-wide knobs: the sign tolerance, the number of random points used by
/// sampling checks, and the seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            tol: crate::DEFAULT_TOL,
            samples: 1000,
            seed: 0,
        }
    }
}

/// What a check found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub pass: bool,
    /// Worst error observed (a count of violations for exact checks).
    pub residual: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub note: String,
}

impl Outcome {
    fn counted(violations: usize, samples: usize) -> Self {
        Outcome {
            pass: violations == 0,
            residual: violations as f64,
            samples,
            note: String::new(),
        }
    }

    fn bounded(worst: f64, bound: f64, samples: usize) -> Self {
        Outcome {
            pass: worst <= bound,
            residual: worst,
            samples,
            note: format!("bound {bound:e}"),
        }
    }

    fn failed(samples: usize, why: impl Into<String>) -> Self {
        Outcome {
            pass: false,
            residual: f64::INFINITY,
            samples,
            note: why.into(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        self.note = if self.note.is_empty() {
            note
        } else {
            format!("{}; {note}", self.note)
        };
        self
    }
}

type Runner = fn(&SuiteConfig, &mut ChaCha8Rng) -> Outcome;

/// A named invariant and the routine that tests it.
pub struct Check {
    pub name: &'static str,
    pub module: &'static str,
    /// The statement being tested, in words.
    pub anchor: &'static str,
    run: Runner,
}

/// One line of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub module: String,
    pub anchor: String,
    pub pass: bool,
    pub residual: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol: f64,
    pub samples: usize,
}

/// Output of a suite run or any other command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub results: Vec<CheckResult>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, cfg: &SuiteConfig, results: Vec<CheckResult>) -> Self {
        let pass = results.iter().all(|r| r.pass);
        Report {
            command: command.into(),
            seed: cfg.seed,
            tolerances: Tolerances {
                tol: cfg.tol,
                samples: cfg.samples,
            },
            results,
            pass,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} (seed {}, tol {:e}, samples {})\n",
            self.command, self.seed, self.tolerances.tol, self.tolerances.samples
        );
        for r in &self.results {
            out.push_str(&format!(
                "{} {:<36} residual {:<12.3e} samples {:<7} {}\n",
                if r.pass { "PASS" } else { "FAIL" },
                r.name,
                r.residual,
                r.samples,
                r.anchor
            ));
            if !r.note.is_empty() {
                out.push_str(&format!("     {}\n", r.note));
            }
        }
        let failed = self.results.iter().filter(|r| !r.pass).count();
        out.push_str(&format!(
            "{} checks, {} failed\n",
            self.results.len(),
            failed
        ));
        out
    }
}

/// Every invariant the suite must cover, as `module/name`.
pub const CHECKLIST: &[&str] = &[
    "matkit/sign-det-multiplicative",
    "matkit/polar-round-trip",
    "matkit/gram-preserves-spd",
    "algebra/sign-constancy",
    "algebra/transport-invariance",
    "algebra/isotope-sign-law",
    "algebra/operator-identities",
    "algebra/opposition",
    "algebra/unital-blocks",
    "algebra/morphisms-injective",
    "decorated/klein-four",
    "decorated/block-shift",
    "decorated/kappa-commutation",
    "decorated/morphism-preservation",
    "equadratic/decomposition",
    "equadratic/uniqueness",
    "equadratic/functor-compatibility",
    "equadratic/block-structure",
    "dim2/functor-fidelity",
    "dim2/block-equivalence",
    "dim2/separation",
    "dim2/round-trip",
    "dim2/density",
    "quat/functor-blocks",
    "quat/functoriality",
    "quat/faithfulness",
    "quat/absolute-valued",
    "quat/stabilizer-consistency",
    "quat/so4-factor",
    "quat/normal-form",
    "cli/json-round-trip",
    "cli/coverage",
];

/// All checks, in report order.
pub fn checks() -> Vec<Check> {
    macro_rules! check {
        ($module:literal, $name:literal, $anchor:literal, $run:expr) => {
            Check {
                module: $module,
                name: $name,
                anchor: $anchor,
                run: $run,
            }
        };
    }
    vec![
        check!(
            "matkit",
            "sign-det-multiplicative",
            "the sign of the determinant is a group homomorphism",
            sign_det_multiplicative
        ),
        check!(
            "matkit",
            "polar-round-trip",
            "M = P·O reconstructs invertible matrices",
            polar_round_trip
        ),
        check!(
            "matkit",
            "gram-preserves-spd",
            "F·S·Fᵗ is positive definite for invertible F",
            gram_preserves_spd
        ),
        check!(
            "algebra",
            "sign-constancy",
            "sgn det L_a and sgn det R_a are constant on a ≠ 0",
            sign_constancy
        ),
        check!(
            "algebra",
            "transport-invariance",
            "isomorphic division algebras share a double sign",
            transport_invariance
        ),
        check!(
            "algebra",
            "isotope-sign-law",
            "the double sign of A_{S,T} is (α·s(T), β·s(S))",
            isotope_sign_law
        ),
        check!(
            "algebra",
            "operator-identities",
            "in A_{S,T}: L°_a = L_{Sa}·T and R°_a = R_{Ta}·S",
            operator_identities
        ),
        check!(
            "algebra",
            "opposition",
            "opposition is an involution exchanging the two signs",
            opposition
        ),
        check!(
            "algebra",
            "unital-blocks",
            "a left unity forces ℓ = +1 and a right unity r = +1",
            unital_blocks
        ),
        check!(
            "algebra",
            "morphisms-injective",
            "morphisms of division algebras are injective",
            morphisms_injective
        ),
        check!(
            "decorated",
            "klein-four",
            "the isotopy functors I_ij compose as the Klein four-group",
            klein_four
        ),
        check!(
            "decorated",
            "block-shift",
            "I_ij sends block (α, β) to ((-1)^j α, (-1)^i β)",
            block_shift
        ),
        check!(
            "decorated",
            "kappa-commutation",
            "morphisms of decorated algebras commute with κ",
            kappa_commutation
        ),
        check!(
            "decorated",
            "morphism-preservation",
            "I_ij maps morphisms to morphisms",
            morphism_preservation
        ),
        check!(
            "equadratic",
            "decomposition",
            "A = ℝe ⊕ Im_e(A)",
            eq_decomposition
        ),
        check!(
            "equadratic",
            "uniqueness",
            "the central idempotent of an e-quadratic algebra is unique",
            eq_uniqueness
        ),
        check!(
            "equadratic",
            "functor-compatibility",
            "I_11 ∘ G equals G composed with the (κ, κ)-isotope",
            eq_functor_compatibility
        ),
        check!(
            "equadratic",
            "block-structure",
            "e-quadratic algebras lie in ++ or --, swapped by the (κ, κ)-isotope",
            eq_block_structure
        ),
        check!(
            "dim2",
            "functor-fidelity",
            "J_ij is full and faithful: hom-sets are group elements matching the pairs",
            dim2_functor_fidelity
        ),
        check!(
            "dim2",
            "block-equivalence",
            "the blocks ++, +-, -+ have identical hom-sets",
            dim2_block_equivalence
        ),
        check!(
            "dim2",
            "separation",
            "Aut of J_11(I, I) has 6 elements, C₂-block automorphism groups at most 2",
            dim2_separation
        ),
        check!(
            "dim2",
            "round-trip",
            "normal forms recover the orbit of the input",
            dim2_round_trip
        ),
        check!(
            "dim2",
            "density",
            "every 2-dimensional division algebra is isomorphic to a normal form",
            dim2_density
        ),
        check!(
            "quat",
            "functor-blocks",
            "H_{α,β} lands in block (α, β)",
            quat_functor_blocks
        ),
        check!(
            "quat",
            "functoriality",
            "H_{α,β} sends s to the morphism ±K_s",
            quat_functoriality
        ),
        check!(
            "quat",
            "faithfulness",
            "K_s determines the class [s]",
            quat_faithfulness
        ),
        check!(
            "quat",
            "absolute-valued",
            "orthogonal objects give absolute-valued algebras, others need not",
            quat_absolute_valued
        ),
        check!(
            "quat",
            "stabilizer-consistency",
            "all four functors see the same stabilizers",
            quat_stabilizer_consistency
        ),
        check!(
            "quat",
            "so4-factor",
            "every rotation of ℍ is x ↦ a·x·b",
            quat_so4_factor
        ),
        check!(
            "quat",
            "normal-form",
            "every isotope of ℍ is isomorphic to some H_{α,β}(x)",
            quat_normal_form_check
        ),
        check!(
            "cli",
            "json-round-trip",
            "algebra JSON reproduces the structure tensor exactly",
            json_round_trip
        ),
        check!(
            "cli",
            "coverage",
            "every listed invariant has a check",
            coverage
        ),
    ]
}

/// Runs every check in parallel and returns results in declaration order.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let list = checks();
    list.par_iter()
        .enumerate()
        .map(|(idx, c)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(idx as u64);
            let out = (c.run)(cfg, &mut rng);
            CheckResult {
                name: format!("{}/{}", c.module, c.name),
                module: c.module.to_string(),
                anchor: c.anchor.to_string(),
                pass: out.pass,
                residual: out.residual,
                samples: out.samples,
                note: out.note,
            }
        })
        .collect()
}

/// Runs a single check by its `module/name`.
pub fn run_check(name: &str, cfg: &SuiteConfig) -> Option<Outcome> {
    let list = checks();
    let idx = list
        .iter()
        .position(|c| format!("{}/{}", c.module, c.name) == name)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(idx as u64);
    Some((list[idx].run)(cfg, &mut rng))
}

fn sampling(cfg: &SuiteConfig, samples: usize, rng: &mut ChaCha8Rng) -> Sampling {
    Sampling::new(samples, cfg.tol, rng.gen())
}

fn tensor_scale(algs: &[&Algebra]) -> f64 {
    algs.iter()
        .flat_map(|a| a.tensor())
        .fold(1.0f64, |m, x| m.max(x.abs()))
}

const DIMS: [usize; 3] = [2, 4, 8];

/// Invertible map with a determinant of random sign.
fn random_signed(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let negative = rng.gen();
    random_invertible_signed(rng, n, negative)
}

// ---- matkit ----

fn sign_det_multiplicative(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let n_cases = 200;
    for k in 0..n_cases {
        let n = [2, 3, 4, 8][k % 4];
        let m = random_signed(rng, n);
        let p = random_signed(rng, n);
        let lhs = sign_det(&(&m * &p), cfg.tol);
        let rhs = sign_det(&m, cfg.tol).and_then(|a| sign_det(&p, cfg.tol).map(|b| a * b));
        if lhs.is_err() || lhs != rhs {
            bad += 1;
        }
    }
    Outcome::counted(bad, n_cases)
}

fn polar_round_trip(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in [2, 3, 4, 8] {
        for _ in 0..cfg.samples {
            let m = random_invertible(rng, n);
            count += 1;
            match polar_decompose(&m) {
                Ok((p, o)) => {
                    let err = (&p * &o).sub(&m).frobenius() / m.frobenius();
                    let orth = (&o.transpose() * &o).max_abs_diff(&Mat::identity(n));
                    let spd = sym_eigen(&p).0[0] > 0.0 && p.asymmetry() == 0.0;
                    worst = worst.max(err).max(orth);
                    if !spd {
                        worst = f64::INFINITY;
                    }
                }
                Err(_) => worst = f64::INFINITY,
            }
        }
    }
    Outcome::bounded(worst, 1e-10, count)
}

fn gram_preserves_spd(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let n_cases = 200;
    let mut bad = 0;
    for k in 0..n_cases {
        let n = [2, 4, 8][k % 3];
        let s = random_spd1_with(rng, n);
        let f = random_invertible(rng, n);
        let g = (&(&f * &s) * &f.transpose()).symmetrize();
        if !(sym_eigen(&g).0[0] > 0.0) {
            bad += 1;
        }
    }
    Outcome::counted(bad, n_cases)
}

// ---- algebra ----

fn sign_constancy(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let n_alg = 51;
    for k in 0..n_alg {
        let n = DIMS[k % 3];
        let alg = random_division_algebra(rng, n);
        let mut left = [0usize; 2];
        let mut right = [0usize; 2];
        let points = (0..n)
            .map(|i| crate::matkit::unit_vector(n, i))
            .collect::<Vec<_>>();
        let random = (0..cfg.samples)
            .map(|_| random_unit_vector(rng, n))
            .collect::<Vec<_>>();
        let mut degenerate = false;
        for a in points.iter().chain(&random) {
            match (
                sign_det(&left_mult(&alg, a), cfg.tol),
                sign_det(&right_mult(&alg, a), cfg.tol),
            ) {
                (Ok(l), Ok(r)) => {
                    left[(l == Sign::Minus) as usize] += 1;
                    right[(r == Sign::Minus) as usize] += 1;
                }
                _ => degenerate = true,
            }
        }
        if degenerate || left.iter().all(|&c| c > 0) || right.iter().all(|&c| c > 0) {
            bad += 1;
        }
    }
    Outcome::counted(bad, n_alg * cfg.samples).with_note(format!("{n_alg} algebras, dims 2/4/8"))
}

fn transport_invariance(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let mut count = 0;
    for k in 0..12 {
        let alg = random_division_algebra(rng, DIMS[k % 3]);
        let Ok(p) = sign_pair(&alg, sampling(cfg, 50, rng)) else {
            return Outcome::failed(count, "source sign pair undefined");
        };
        for _ in 0..100 {
            count += 1;
            let f = random_invertible(rng, alg.dim());
            let moved = transport(&alg, &f).and_then(|b| sign_pair(&b, sampling(cfg, 20, rng)));
            if moved != Ok(p) {
                bad += 1;
            }
        }
    }
    Outcome::counted(bad, count)
}

fn isotope_sign_law(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let n_cases = 500;
    for k in 0..n_cases {
        let alg = random_division_algebra(rng, DIMS[k % 3]);
        let n = alg.dim();
        let s = random_signed(rng, n);
        let t = random_signed(rng, n);
        let ok = (|| -> crate::Result<bool> {
            let p = sign_pair(&alg, sampling(cfg, 20, rng))?;
            let expected = p.times(sign_det(&t, cfg.tol)?, sign_det(&s, cfg.tol)?);
            Ok(sign_pair(&isotope(&alg, &s, &t)?, sampling(cfg, 20, rng))? == expected)
        })();
        if ok != Ok(true) {
            bad += 1;
        }
    }
    Outcome::counted(bad, n_cases)
}

fn operator_identities(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    let n_cases = 100;
    for k in 0..n_cases {
        let alg = random_division_algebra(rng, DIMS[k % 3]);
        let n = alg.dim();
        let s = random_invertible(rng, n);
        let t = random_invertible(rng, n);
        let iso = isotope(&alg, &s, &t).expect("invertible maps");
        let a = random_unit_vector(rng, n);
        let l = &left_mult(&alg, &s.mul_vec(&a)) * &t;
        let r = &right_mult(&alg, &t.mul_vec(&a)) * &s;
        worst = worst
            .max(left_mult(&iso, &a).max_abs_diff(&l))
            .max(right_mult(&iso, &a).max_abs_diff(&r));
    }
    Outcome::bounded(worst, 1e-12, n_cases)
}

fn opposition(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let n_cases = 100;
    for k in 0..n_cases {
        let alg = random_division_algebra(rng, DIMS[k % 3]);
        let op = opposite(&alg);
        let involution = opposite(&op).tensor() == alg.tensor();
        let swapped = match (
            sign_pair(&alg, sampling(cfg, 20, rng)),
            sign_pair(&op, sampling(cfg, 20, rng)),
        ) {
            (Ok(p), Ok(q)) => q == p.swap(),
            _ => false,
        };
        if !(involution && swapped) {
            bad += 1;
        }
    }
    Outcome::counted(bad, n_cases)
}

/// Left-unital, right-unital and unital algebras built from a division
/// algebra `A` with unity `u`:
/// `A_{σ, L_{σu}⁻¹}` has left unity `u`, `A_{R_{τu}⁻¹, τ}` right unity `u`,
/// and `A_{R_a⁻¹, L_a⁻¹}` has unity `a·a`.
pub fn unital_examples(rng: &mut ChaCha8Rng, alg: &Algebra) -> [(Algebra, &'static str); 3] {
    let n = alg.dim();
    let u = random_unit_vector(rng, n);
    let sigma = random_invertible(rng, n);
    let tau_l = left_mult(alg, &sigma.mul_vec(&u))
        .inverse()
        .expect("division");
    let left = isotope(alg, &sigma, &tau_l).expect("invertible");
    let tau = random_invertible(rng, n);
    let sigma_r = right_mult(alg, &tau.mul_vec(&u))
        .inverse()
        .expect("division");
    let right = isotope(alg, &sigma_r, &tau).expect("invertible");
    let a = random_unit_vector(rng, n);
    let ra = right_mult(alg, &a).inverse().expect("division");
    let la = left_mult(alg, &a).inverse().expect("division");
    let both = isotope(alg, &ra, &la).expect("invertible");
    [(left, "left"), (right, "right"), (both, "two-sided")]
}

fn unital_blocks(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let mut count = 0;
    for which in [Classical::C, Classical::H, Classical::O] {
        count += 1;
        if block_of(&classical(which), sampling(cfg, 100, rng)) != Ok("++") {
            bad += 1;
        }
    }
    for k in 0..30 {
        let alg = random_division_algebra(rng, DIMS[k % 3]);
        for (b, kind) in unital_examples(rng, &alg) {
            count += 1;
            let found = find_unities(&b, 1e-8);
            let detected = match kind {
                "left" => !found.left.is_empty(),
                "right" => !found.right.is_empty(),
                _ => !found.two_sided.is_empty(),
            };
            let Ok(p) = sign_pair(&b, sampling(cfg, 50, rng)) else {
                bad += 1;
                continue;
            };
            let consistent = (found.left.is_empty() || p.ell == Sign::Plus)
                && (found.right.is_empty() || p.r == Sign::Plus)
                && (found.two_sided.is_empty() || p.label() == "++");
            if !(detected && consistent) {
                bad += 1;
            }
        }
    }
    Outcome::counted(bad, count)
}

fn morphisms_injective(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let mut accepted = 0;
    let n_cases = 100;
    for k in 0..n_cases {
        let alg = random_division_algebra(rng, DIMS[k % 3]);
        let n = alg.dim();
        let f = random_invertible(rng, n);
        let dst = transport(&alg, &f).expect("invertible");
        let tol = 1e-9 * tensor_scale(&[&alg, &dst]);
        for cand in [f.clone(), random_invertible(rng, n)] {
            if is_morphism(&cand, &alg, &dst, tol) == Ok(true) {
                accepted += 1;
                if !(cand.det().abs() > cfg.tol) {
                    bad += 1;
                }
            }
        }
        if is_morphism(&Mat::zeros(n, n), &alg, &dst, tol).is_ok() {
            bad += 1;
        }
    }
    Outcome::counted(bad, n_cases).with_note(format!("{accepted} morphisms accepted"))
}

// ---- decorated ----

fn decorated_corpus(rng: &mut ChaCha8Rng, count: usize) -> Vec<DecoratedAlgebra> {
    (0..count)
        .map(|k| {
            random_decorated(
                rng,
                if k % 2 == 0 {
                    Classical::H
                } else {
                    Classical::O
                },
            )
        })
        .collect()
}

const EXPONENTS: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

fn klein_four(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let corpus = decorated_corpus(rng, 100);
    let mut worst = 0.0f64;
    for x in &corpus {
        let base: Vec<DecoratedAlgebra> = EXPONENTS
            .iter()
            .map(|&(i, j)| functor_i(i, j, x).unwrap())
            .collect();
        for (p, &(i, j)) in EXPONENTS.iter().enumerate() {
            for &(k, l) in &EXPONENTS {
                let composed = functor_i(k, l, &base[p]).unwrap();
                let target = EXPONENTS.iter().position(|&e| e == (i ^ k, j ^ l)).unwrap();
                worst = worst.max(composed.algebra().max_tensor_diff(base[target].algebra()));
            }
        }
    }
    Outcome::bounded(worst, 1e-12, corpus.len())
}

fn block_shift(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let corpus = decorated_corpus(rng, 50);
    let mut bad = 0;
    for x in &corpus {
        let Ok(p) = sign_pair(x.algebra(), sampling(cfg, 50, rng)) else {
            bad += 4;
            continue;
        };
        for &(i, j) in &EXPONENTS {
            let expected = p.times(Sign::from_parity(j), Sign::from_parity(i));
            let got =
                functor_i(i, j, x).and_then(|y| sign_pair(y.algebra(), sampling(cfg, 50, rng)));
            if got != Ok(expected) {
                bad += 1;
            }
        }
    }
    Outcome::counted(bad, corpus.len() * 4)
}

fn kappa_commutation(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let corpus = decorated_corpus(rng, 100);
    let mut worst = 0.0f64;
    for x in &corpus {
        let f = random_invertible(rng, x.n());
        let y = transport_decorated(x, &f).expect("invertible");
        worst = worst.max((&f * &kappa(x)).max_abs_diff(&(&kappa(&y) * &f)));
    }
    Outcome::bounded(worst, 1e-10, corpus.len())
}

fn morphism_preservation(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let corpus = decorated_corpus(rng, 100);
    let mut worst = 0.0f64;
    for x in &corpus {
        let f = random_invertible(rng, x.n());
        let y = transport_decorated(x, &f).expect("invertible");
        for &(i, j) in &EXPONENTS {
            let (xi, yi) = (functor_i(i, j, x).unwrap(), functor_i(i, j, &y).unwrap());
            let res = morphism_residual(&f, xi.algebra(), yi.algebra())
                / tensor_scale(&[xi.algebra(), yi.algebra()]);
            worst = worst.max(res);
        }
    }
    Outcome::bounded(worst, 1e-10, corpus.len() * 4)
        .with_note("residual relative to the largest structure constant")
}

// ---- e-quadratic ----

/// ℍ, 𝕆 and 20 e-quadratic algebras in generic coordinates.
pub fn e_quadratic_corpus(rng: &mut ChaCha8Rng) -> Vec<Algebra> {
    let mut out = vec![classical(Classical::H), classical(Classical::O)];
    out.extend((0..20).map(|k| {
        random_e_quadratic(
            rng,
            if k % 2 == 0 {
                Classical::H
            } else {
                Classical::O
            },
        )
    }));
    out
}

fn eq_uniqueness(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let corpus = e_quadratic_corpus(rng);
    let mut bad = 0;
    let mut worst = 0.0f64;
    for a in &corpus {
        let Ok(ids) = central_idempotents(a, cfg.tol) else {
            bad += 1;
            continue;
        };
        let qualifying: Vec<_> = ids
            .into_iter()
            .filter(|e| is_e_quadratic(a, e, cfg.tol) == Ok(true))
            .collect();
        if qualifying.len() != 1 {
            bad += 1;
            continue;
        }
        let e = &qualifying[0];
        let sq = a.mul(e, e);
        worst = worst.max(sq.iter().zip(e).fold(0.0, |m, (x, y)| m.max((x - y).abs())));
    }
    let mut out = Outcome::counted(bad, corpus.len());
    if worst > 1e-9 {
        out.pass = false;
    }
    out.with_note(format!("worst idempotent residual {worst:.3e}"))
}

fn eq_decomposition(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let corpus = e_quadratic_corpus(rng);
    let mut worst = f64::INFINITY;
    for a in &corpus {
        let g = match functor_g(a, cfg.tol) {
            Ok(g) => g,
            Err(e) => return Outcome::failed(corpus.len(), e.to_string()),
        };
        let e = g.u().col(0);
        if let Ok(im) = im_e(a, &e, cfg.tol) {
            let b = Mat::from_cols(&[e]).unwrap().hcat(&im);
            let s = svd(&b).s;
            worst = worst.min(s[s.len() - 1] / s[0]);
        }
    }
    Outcome {
        pass: worst > 1e-8,
        residual: worst,
        samples: corpus.len(),
        note: "smallest relative singular value of [e | Im]".into(),
    }
}

fn eq_functor_compatibility(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let corpus = e_quadratic_corpus(rng);
    let mut bad = 0;
    let mut worst = 0.0f64;
    for a in &corpus {
        let ok = (|| -> crate::Result<(bool, f64)> {
            let g = functor_g(a, cfg.tol)?;
            let lhs = functor_i(1, 1, &g)?;
            let k = kappa(&g);
            let rhs = functor_g(&isotope(a, &k, &k)?, cfg.tol)?;
            Ok((
                same_decorated(&lhs, &rhs, 1e-12),
                lhs.algebra().max_tensor_diff(rhs.algebra()),
            ))
        })();
        match ok {
            Ok((true, d)) => worst = worst.max(d),
            _ => bad += 1,
        }
    }
    let mut out = Outcome::counted(bad, corpus.len());
    out.residual = out.residual.max(worst);
    out.with_note("tensors and subspaces compared at 1e-12")
}

fn eq_block_structure(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let corpus = e_quadratic_corpus(rng);
    let mut bad = 0;
    for a in &corpus {
        let ok = (|| -> crate::Result<bool> {
            let g = functor_g(a, cfg.tol)?;
            let k = kappa(&g);
            let p = block_of(a, sampling(cfg, 50, rng))?;
            let q = block_of(&isotope(a, &k, &k)?, sampling(cfg, 50, rng))?;
            Ok(matches!((p, q), ("++", "--") | ("--", "++")))
        })();
        if ok != Ok(true) {
            bad += 1;
        }
    }
    Outcome::counted(bad, corpus.len())
}

// ---- dim2 ----

const BLOCKS_2D: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

fn act(g: &Mat, nf: &NormalForm2D) -> NormalForm2D {
    let gt = g.transpose();
    NormalForm2D {
        i: nf.i,
        j: nf.j,
        a: (&(g * &nf.a) * &gt).symmetrize(),
        b: (&(g * &nf.b) * &gt).symmetrize(),
    }
}

/// Labels of the D₃ elements that are algebra morphisms between the built algebras.
fn direct_morphisms(src: &NormalForm2D, dst: &NormalForm2D, tol: f64) -> Vec<String> {
    let (x, y) = (build2d(src).unwrap(), build2d(dst).unwrap());
    Group2D::D3
        .elements()
        .into_iter()
        .filter(|g| is_morphism(&g.matrix, &x, &y, tol) == Ok(true))
        .map(|g| g.label)
        .collect()
}

fn labels(v: Vec<crate::dim2::GroupElement2D>) -> Vec<String> {
    v.into_iter().map(|g| g.label).collect()
}

fn dim2_functor_fidelity(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let mut count = 0;
    for &(i, j) in &BLOCKS_2D {
        let group = Group2D::for_block(i, j);
        let elems = group.elements();
        for k in 0..20 {
            count += 1;
            let src = random_normal_form(rng, i, j);
            // mostly related pairs, sometimes an unrelated one
            let dst = if k % 4 == 3 {
                random_normal_form(rng, i, j)
            } else {
                act(&elems[rng.gen_range(0..elems.len())].matrix, &src)
            };
            let hom = labels(hom2d(&src, &dst, 1e-9).unwrap());
            let grp = labels(groupoid_hom(
                group,
                (&src.a, &src.b),
                (&dst.a, &dst.b),
                1e-9,
            ));
            let direct = direct_morphisms(&src, &dst, 1e-9);
            if hom != grp || hom != direct || (k % 4 != 3 && hom.is_empty()) {
                bad += 1;
            }
        }
    }
    Outcome::counted(bad, count)
}

fn dim2_block_equivalence(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let n_cases = 20;
    for k in 0..n_cases {
        let x = random_normal_form(rng, 0, 0);
        let y = if k % 4 == 3 {
            random_normal_form(rng, 0, 0)
        } else {
            act(&crate::dim2::k_matrix(), &x)
        };
        let sets: Vec<Vec<String>> = [(0, 0), (0, 1), (1, 0)]
            .iter()
            .map(|&(i, j)| {
                let src = NormalForm2D { i, j, ..x.clone() };
                let dst = NormalForm2D { i, j, ..y.clone() };
                direct_morphisms(&src, &dst, 1e-9)
            })
            .collect();
        if sets.iter().any(|s| *s != sets[0]) {
            bad += 1;
        }
    }
    Outcome::counted(bad, n_cases)
}

fn dim2_separation(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let id = Mat::identity(2);
    let ckk = NormalForm2D {
        i: 1,
        j: 1,
        a: id.clone(),
        b: id.clone(),
    };
    let built = build2d(&ckk).unwrap();
    let mut worst = 0.0f64;
    let mut order_d3 = 0;
    for g in Group2D::D3.elements() {
        let r = morphism_residual(&g.matrix, &built, &built);
        if r <= 1e-12 {
            order_d3 += 1;
            worst = worst.max(r);
        }
    }
    let mut max_c2 = 0;
    let n_objects = 50;
    for k in 0..n_objects {
        let (i, j) = BLOCKS_2D[k % 3];
        let x = if k < 3 {
            NormalForm2D {
                i,
                j,
                a: id.clone(),
                b: id.clone(),
            }
        } else {
            random_normal_form(rng, i, j)
        };
        max_c2 = max_c2.max(direct_morphisms(&x, &x, 1e-9).len());
    }
    Outcome {
        pass: order_d3 == 6 && max_c2 <= 2,
        residual: worst,
        samples: n_objects + 1,
        note: format!("|Aut J11(I,I)| = {order_d3}; max |Aut| over C2 blocks = {max_c2}"),
    }
}

fn dim2_round_trip(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let mut worst = 0.0f64;
    let n_cases = 100;
    for k in 0..n_cases {
        let (i, j) = BLOCKS_2D[k % 4];
        let src = random_normal_form(rng, i, j);
        let f = random_invertible(rng, 2);
        let alg = transport(&build2d(&src).unwrap(), &f).unwrap();
        match normal_form_2d(&alg, cfg.tol) {
            Ok(r) => {
                worst = worst.max(r.residual);
                let same_orbit = hom2d(&r.normal_form, &src, 1e-7)
                    .map(|h| !h.is_empty())
                    .unwrap_or(false);
                if r.normal_form.block() != src.block() || !same_orbit || r.residual > 1e-8 {
                    bad += 1;
                }
            }
            Err(_) => bad += 1,
        }
    }
    let mut out = Outcome::counted(bad, n_cases);
    out.note = format!("worst isomorphism residual {worst:.3e}");
    out
}

fn dim2_density(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let mut worst = 0.0f64;
    let n_cases = 100;
    for _ in 0..n_cases {
        let alg = random_division_2d(rng);
        let expected = block_of(&alg, sampling(cfg, 200, rng));
        match normal_form_2d(&alg, cfg.tol) {
            Ok(r) if Ok(r.normal_form.block()) == expected && r.residual <= 1e-8 => {
                worst = worst.max(r.residual)
            }
            _ => bad += 1,
        }
    }
    let mut out = Outcome::counted(bad, n_cases);
    out.note = format!("worst isomorphism residual {worst:.3e}");
    out
}

// ---- quat ----

const SIGNS: [(Sign, Sign); 4] = [
    (Sign::Plus, Sign::Plus),
    (Sign::Plus, Sign::Minus),
    (Sign::Minus, Sign::Plus),
    (Sign::Minus, Sign::Minus),
];

fn random_quat(rng: &mut ChaCha8Rng) -> Quat {
    loop {
        let q = Quat::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if q.norm() > 1e-3 {
            return q;
        }
    }
}

/// Random object with SPD parts of determinant one.
pub fn random_z_object(rng: &mut ChaCha8Rng) -> ZObject {
    let (a, b) = (random_quat(rng), random_quat(rng));
    let (c, d) = (random_spd1_with(rng, 4), random_spd1_with(rng, 4));
    ZObject::new(a, b, c, d).expect("generated invariants hold")
}

fn quat_functor_blocks(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    for &(alpha, beta) in &SIGNS {
        for _ in 0..50 {
            let x = random_z_object(rng);
            let got =
                functor_h(alpha, beta, &x).and_then(|a| sign_pair(&a, sampling(cfg, 50, rng)));
            if got != Ok(SignPair::new(alpha, beta)) {
                bad += 1;
            }
        }
    }
    Outcome::counted(bad, 200)
}

fn quat_functoriality(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    let mut flips = 0;
    for &(alpha, beta) in &SIGNS {
        for k in 0..100 {
            let mut x = random_z_object(rng);
            if k % 4 == 0 {
                // purely imaginary representatives can change sign under K_s
                x.a = Quat::new(0.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 1.0)
                    .representative()
                    .unwrap();
                x.b = Quat::new(0.0, 1.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    .representative()
                    .unwrap();
            }
            let s = random_quat(rng);
            let y = z_action(s, &x).unwrap();
            let f = morphism_image(s, &x).unwrap();
            if f.max_abs_diff(&k_map(s).unwrap()) > 0.0 {
                flips += 1;
            }
            let (src, dst) = (
                functor_h(alpha, beta, &x).unwrap(),
                functor_h(alpha, beta, &y).unwrap(),
            );
            worst = worst.max(morphism_residual(&f, &src, &dst));
        }
    }
    Outcome::bounded(worst, 1e-8, 400)
        .with_note(format!("{flips} images carry the representative sign -1"))
}

fn quat_faithfulness(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    for k in 0..cfg.samples {
        let s = random_quat(rng);
        let t = if k % 2 == 0 {
            let lambda: f64 = rng.gen_range(0.1..3.0) * if rng.gen() { 1.0 } else { -1.0 };
            s.scale(lambda)
        } else {
            random_quat(rng)
        };
        let same_map = k_map(s).unwrap().max_abs_diff(&k_map(t).unwrap()) <= 1e-12;
        let same_class = s
            .representative()
            .unwrap()
            .max_abs_diff(t.representative().unwrap())
            <= 1e-9;
        if same_map != same_class {
            bad += 1;
        }
    }
    Outcome::counted(bad, cfg.samples)
}

fn quat_absolute_valued(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..cfg.samples {
        let (alpha, beta) = SIGNS[k % 4];
        let x = ZObject::orthogonal(random_quat(rng), random_quat(rng)).unwrap();
        let alg = functor_h(alpha, beta, &x).unwrap();
        let (u, v) = (random_unit_vector(rng, 4), random_unit_vector(rng, 4));
        let (su, sv) = (rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
        let u: Vec<f64> = u.iter().map(|c| c * su).collect();
        let v: Vec<f64> = v.iter().map(|c| c * sv).collect();
        worst = worst.max((norm(&alg.mul(&u, &v)) - norm(&u) * norm(&v)).abs());
    }
    // a generic SPD part breaks multiplicativity of the norm
    let mut witness = false;
    for _ in 0..20 {
        let x = random_z_object(rng);
        let alg = functor_h(Sign::Plus, Sign::Plus, &x).unwrap();
        let (u, v) = (random_unit_vector(rng, 4), random_unit_vector(rng, 4));
        if (norm(&alg.mul(&u, &v)) - 1.0).abs() > 1e-6 {
            witness = true;
            break;
        }
    }
    let out = Outcome::bounded(worst, 1e-10, cfg.samples);
    Outcome {
        pass: out.pass && witness,
        ..out
    }
    .with_note(if witness {
        "violation witnessed for C ≠ I"
    } else {
        "no violation found for C ≠ I"
    })
}

/// An object whose stabilizer contains the rotations about the i-axis:
/// `a`, `b` in span{1, i} and `C`, `D` acting as an SPD block on span{1, i}
/// and a multiple of the identity on span{j, k}.
fn axial_object(rng: &mut ChaCha8Rng) -> ZObject {
    let mut spd = || {
        let p = random_spd1_with(rng, 2);
        let mu: f64 = rng.gen_range(0.5..2.0);
        let scale = (mu * mu).powf(-0.5);
        let mut m = Mat::zeros(4, 4);
        for r in 0..2 {
            for c in 0..2 {
                m[(r, c)] = p[(r, c)] * scale;
            }
        }
        m[(2, 2)] = mu;
        m[(3, 3)] = mu;
        m
    };
    let (c, d) = (spd(), spd());
    let a = Quat::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0, 0.0);
    let b = Quat::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0, 0.0);
    ZObject::new(a, b, c, d).expect("block-diagonal SPD of determinant one")
}

fn quat_stabilizer_consistency(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let mut stabilizing = 0;
    let mut count = 0;
    for k in 0..20 {
        let x = if k % 2 == 0 {
            axial_object(rng)
        } else {
            random_z_object(rng)
        };
        let along_axis = Quat::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0, 0.0);
        for s in [along_axis, Quat::new(0.0, 0.0, 1.0, 0.0), random_quat(rng)] {
            count += 1;
            let y = z_action(s, &x).unwrap();
            let fixed = y.max_abs_diff(&x) <= 1e-9;
            let f = morphism_image(s, &x).unwrap();
            let auts: Vec<bool> = SIGNS
                .iter()
                .map(|&(alpha, beta)| {
                    let h = functor_h(alpha, beta, &x).unwrap();
                    is_morphism(&f, &h, &h, 1e-9) == Ok(true)
                })
                .collect();
            if auts.iter().any(|&a| a != fixed) {
                bad += 1;
            }
            stabilizing += fixed as usize;
        }
    }
    Outcome::counted(bad, count).with_note(format!("{stabilizing} stabilizing pairs"))
}

fn quat_so4_factor(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let o = random_special_orthogonal(rng, 4);
        match so4_factor(&o) {
            Ok((a, b)) => {
                worst = worst.max((&a.left_matrix() * &b.right_matrix()).sub(&o).frobenius())
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    Outcome::bounded(worst, 1e-10, 100)
}

fn quat_normal_form_check(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    let mut bad = 0;
    for _ in 0..100 {
        let s = random_signed(rng, 4);
        let t = random_signed(rng, 4);
        match quat_normal_form(&s, &t, cfg.tol) {
            Ok(nf) => {
                worst = worst.max(nf.residual);
                if (nf.alpha, nf.beta) != (Sign::of(t.det()), Sign::of(s.det())) {
                    bad += 1;
                }
            }
            Err(_) => bad += 1,
        }
    }
    // orthogonal pairs land on orthogonal objects
    for _ in 0..20 {
        let s = random_orthogonal(rng, 4);
        let t = random_orthogonal(rng, 4);
        match quat_normal_form(&s, &t, cfg.tol) {
            Ok(nf) if nf.object.c == Mat::identity(4) && nf.object.d == Mat::identity(4) => {}
            _ => bad += 1,
        }
    }
    let out = Outcome::bounded(worst, 1e-8, 120);
    Outcome {
        pass: out.pass && bad == 0,
        ..out
    }
    .with_note(format!("{bad} block or shape mismatches"))
}

// ---- cli ----

fn json_round_trip(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let mut algs: Vec<Algebra> = [Classical::R, Classical::C, Classical::H, Classical::O]
        .into_iter()
        .map(classical)
        .collect();
    algs.extend((0..10).map(|k| random_division_algebra(rng, DIMS[k % 3])));
    let mut bad = 0;
    for a in &algs {
        match Algebra::from_json(&a.to_json()) {
            Ok(b) if b.tensor() == a.tensor() => {}
            _ => bad += 1,
        }
    }
    for x in decorated_corpus(rng, 4) {
        match DecoratedAlgebra::from_json(&x.to_json()) {
            Ok(y) if y == x => {}
            _ => bad += 1,
        }
    }
    Outcome::counted(bad, algs.len() + 4)
}

fn coverage(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Outcome {
    let names: Vec<String> = checks()
        .iter()
        .map(|c| format!("{}/{}", c.module, c.name))
        .collect();
    let missing: Vec<&str> = CHECKLIST
        .iter()
        .copied()
        .filter(|item| !names.iter().any(|n| n == item))
        .collect();
    let extra: Vec<&String> = names
        .iter()
        .filter(|n| !CHECKLIST.contains(&n.as_str()))
        .collect();
    let mut out = Outcome::counted(missing.len() + extra.len(), CHECKLIST.len());
    if !missing.is_empty() {
        out.note = format!("missing: {}", missing.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checklist_is_covered() {
        let out = coverage(&SuiteConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(out.pass, "{}", out.note);
        assert_eq!(checks().len(), CHECKLIST.len());
    }

    #[test]
    fn single_checks_run() {
        let cfg = SuiteConfig {
            samples: 50,
            ..SuiteConfig::default()
        };
        for name in [
            "matkit/gram-preserves-spd",
            "dim2/separation",
            "quat/so4-factor",
        ] {
            let out = run_check(name, &cfg).unwrap();
            assert!(out.pass, "{name}: {out:?}");
        }
        assert!(run_check("nope/nothing", &cfg).is_none());
    }

    #[test]
    fn report_text_lists_every_result() {
        let cfg = SuiteConfig::default();
        let results = vec![CheckResult {
            name: "x/y".into(),
            module: "x".into(),
            anchor: "a statement".into(),
            pass: false,
            residual: 1.0,
            samples: 3,
            note: String::new(),
        }];
        let r = Report::new("verify", &cfg, results);
        assert!(!r.pass);
        let text = r.to_text();
        assert!(text.starts_with("verify (seed 0"));
        assert!(text.contains("FAIL x/y"));
        assert!(text.contains("1 checks, 1 failed"));
    }
}
