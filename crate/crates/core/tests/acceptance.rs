//! Acceptance criteria, one line each. Runs without the test harness so the
//! lines always print; exits nonzero if any outcome differs from the
//! recorded expectation.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lkcat::exactla::is_invertible;
use lkcat::front::FrontDiagram;
use lkcat::mutation::{
    apply_braid_word, block_left_mutation, mutation_period, pair_left_mutation, pair_right_mutation, BraidLetter,
    EulerLattice, ExceptionalSequence, LatticeVector, SODPair,
};
use lkcat::puiseux::FormalType;
use lkcat::schober::{decategorify_schober, validate_irregular_gluing, IrregularGluing, SchoberError, StokesSchoberShadow};
use lkcat::sheafknot::{base_points, monodromy, monodromy_from, transport, validate_front_sheaf, CrossingFilling, FrontSheaf};
use lkcat::sheafline::{decategorify_line, validate_line, Coorientation};
use lkcat::{ExactMatrix, Scalar, Subspace};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn eps() -> BigRational {
    BigRational::new(1.into(), 10.into())
}

fn ms(d: Duration) -> String {
    format!("{} ms", d.as_millis())
}

fn s(x: i64) -> Scalar {
    Scalar::from_int(x)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Scalar> {
    (0..n).map(|_| s(rng.gen_range(-3..4))).collect()
}

/// Columns of a random invertible integer matrix.
fn random_basis(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Scalar>> {
    loop {
        let cols: Vec<Vec<Scalar>> = (0..n).map(|_| random_vec(rng, n)).collect();
        if Subspace::span(n, &cols).dim() == n {
            return cols;
        }
    }
}

// ---------------------------------------------------------------------------
// 1

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let t = FormalType::parse_all(&["(2/3)*z^(-3/2)", "(-2/3)*z^(-3/2)"]).unwrap();
    let front = FrontDiagram::build(&t, &eps()).unwrap();
    let took = start.elapsed();
    let got = (front.strands(), front.crossing_count(), front.components().len());
    outcome(
        got == (2, 3, 1) && took < Duration::from_secs(1),
        format!("strands/crossings/components = {got:?}, {}", ms(took)),
    )
}

// ---------------------------------------------------------------------------
// 2

/// `(pass, detail, matches the recorded expectation)`.
fn criterion_2() -> (Outcome, bool) {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok_from_2 = true;
    let mut n1_rejected = false;
    for n in 1..=6usize {
        let (a, b) = (format!("z^(-{n})"), format!("i*z^(-{n})"));
        let built = FormalType::parse_all(&[a.as_str(), b.as_str()])
            .map_err(|e| e.to_string())
            .and_then(|t| FrontDiagram::build(&t, &eps()).map_err(|e| e.to_string()));
        match built {
            Ok(f) => {
                lines.push(format!("N={n}: {}", f.crossing_count()));
                ok_from_2 &= n >= 2 && f.crossing_count() == 2 * n;
            }
            Err(e) => {
                lines.push(format!("N={n}: rejected ({e})"));
                if n == 1 {
                    n1_rejected = true;
                } else {
                    ok_from_2 = false;
                }
            }
        }
    }
    let took = start.elapsed();
    let pass = ok_from_2 && !n1_rejected && took < Duration::from_secs(1);
    let mut detail = format!("{}; {}", lines.join(", "), ms(took));
    if n1_rejected {
        detail.push_str("; N=1 normalizes to two zero classes (z^-1 lies in the quotiented part), documented in README");
    }
    // Expected: N = 2..6 exact, N = 1 rejected as a duplicate class.
    (outcome(pass, detail), ok_from_2 && n1_rejected)
}

// ---------------------------------------------------------------------------
// 3: independent oracle for crossing exactness.

fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>], inner: usize, cols: usize) -> Vec<Vec<Scalar>> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Scalar::zero();
                    for k in 0..inner {
                        acc += &(&row[k] * &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn det_laplace(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    if n == 0 {
        return Scalar::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Scalar::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Scalar>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][j] * &det_laplace(&minor);
        if j % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Rank as the size of the largest nonzero minor.
fn rank_minors(m: &[Vec<Scalar>], rows: usize, cols: usize) -> usize {
    for k in (1..=rows.min(cols)).rev() {
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<Scalar>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j].clone()).collect()).collect();
                if !det_laplace(&sub).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

fn nested(m: &ExactMatrix) -> Vec<Vec<Scalar>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].clone()).collect()).collect()
}

fn oracle_exact(f: &CrossingFilling) -> bool {
    let [b, l, r, t] = f.dims;
    let (bl, lt, br, rt) = (nested(&f.bottom_west), nested(&f.west_top), nested(&f.bottom_east), nested(&f.east_top));
    let injective = rank_minors(&bl, l, b) == b
        && rank_minors(&br, r, b) == b
        && rank_minors(&lt, t, l) == l
        && rank_minors(&rt, t, r) == r;
    // d1 = (e_BL; e_BR), d2 = (e_LT | -e_RT)
    let d1: Vec<Vec<Scalar>> = bl.iter().chain(br.iter()).cloned().collect();
    let d2: Vec<Vec<Scalar>> = (0..t)
        .map(|i| lt[i].iter().cloned().chain(rt[i].iter().map(|x| -x)).collect())
        .collect();
    let composite_zero = mat_mul(&d2, &d1, l + r, b).iter().flatten().all(|x| x.is_zero());
    injective && composite_zero && rank_minors(&d1, l + r, b) == b && rank_minors(&d2, t, l + r) == t && l + r == b + t
}

fn random_filling(rng: &mut ChaCha8Rng) -> CrossingFilling {
    let t = rng.gen_range(1..=4);
    let b = rng.gen_range(0..t);
    let l = rng.gen_range(b..=t);
    let basis = random_basis(rng, t);
    let bsp = Subspace::span(t, &basis[..b]);
    let lsp = Subspace::span(t, &basis[..l]);
    let mut rv: Vec<Vec<Scalar>> = basis[..b].to_vec();
    rv.extend(basis[l..].iter().cloned());
    let rsp = Subspace::span(t, &rv);
    CrossingFilling::from_subspaces(&bsp, &lsp, &rsp, &Subspace::full(t)).expect("flag-constructed filling")
}

fn perturb(rng: &mut ChaCha8Rng, f: &CrossingFilling) -> CrossingFilling {
    let mut g = f.clone();
    let maps: Vec<usize> = [&g.bottom_west, &g.west_top, &g.bottom_east, &g.east_top]
        .iter()
        .enumerate()
        .filter(|(_, m)| m.rows() * m.cols() > 0)
        .map(|(i, _)| i)
        .collect();
    let which = *maps.choose(rng).unwrap();
    let m = match which {
        0 => &mut g.bottom_west,
        1 => &mut g.west_top,
        2 => &mut g.bottom_east,
        _ => &mut g.east_top,
    };
    let (i, j) = (rng.gen_range(0..m.rows()), rng.gen_range(0..m.cols()));
    let delta = [-2, -1, 1, 2][rng.gen_range(0..4)];
    m[(i, j)] += &s(delta);
    g
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut accepted, mut rejected, mut disagreements, mut perturbations) = (0, 0, 0, 0);
    while accepted < 100 || rejected < 100 {
        let f = random_filling(&mut rng);
        let oracle = oracle_exact(&f);
        if oracle != f.is_valid() {
            disagreements += 1;
        }
        if oracle && f.is_valid() {
            accepted += 1;
        }
        // Resample single-entry perturbations until one is invalid to the oracle.
        for _ in 0..50 {
            let g = perturb(&mut rng, &f);
            perturbations += 1;
            let o = oracle_exact(&g);
            if o != g.is_valid() {
                disagreements += 1;
            }
            if !o {
                if !g.is_valid() {
                    rejected += 1;
                }
                break;
            }
        }
    }
    outcome(
        accepted >= 100 && rejected >= 100 && disagreements == 0,
        format!("{accepted} fillings accepted, {rejected} invalid perturbations rejected, {perturbations} perturbations checked, {disagreements} disagreements with the oracle"),
    )
}

// ---------------------------------------------------------------------------
// 4

/// Ordered basis with block sizes; flag = partial sums by block.
#[derive(Clone)]
struct Blocks {
    ambient: usize,
    blocks: Vec<Vec<Vec<Scalar>>>,
}

impl Blocks {
    fn flag(&self) -> Vec<Subspace> {
        let mut acc: Vec<Vec<Scalar>> = Vec::new();
        let mut out = vec![Subspace::zero(self.ambient)];
        for b in &self.blocks {
            acc.extend(b.iter().cloned());
            out.push(Subspace::span(self.ambient, &acc));
        }
        out
    }

    /// Swap blocks `k, k+1`, shearing the rising block by the other.
    fn cross(&mut self, rng: &mut ChaCha8Rng, k: usize) {
        let a = self.blocks[k].clone();
        let b: Vec<Vec<Scalar>> = self.blocks[k + 1]
            .iter()
            .map(|v| {
                let mut w = v.clone();
                for u in &a {
                    let c = s(rng.gen_range(-2..3));
                    for (wi, ui) in w.iter_mut().zip(u) {
                        *wi += &(&c * ui);
                    }
                }
                w
            })
            .collect();
        self.blocks[k] = b;
        self.blocks[k + 1] = a;
    }
}

fn random_blocks(rng: &mut ChaCha8Rng, n: usize) -> Blocks {
    let sizes: Vec<usize> = loop {
        let sz: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        let total: usize = sz.iter().sum();
        if (1..=5).contains(&total) {
            break sz;
        }
    };
    let ambient: usize = sizes.iter().sum();
    let basis = random_basis(rng, ambient);
    let mut it = basis.into_iter();
    Blocks {
        ambient,
        blocks: sizes.iter().map(|&k| it.by_ref().take(k).collect()).collect(),
    }
}

/// Out along a random word and back along its reverse.
fn random_there_and_back(rng: &mut ChaCha8Rng) -> FrontSheaf {
    let n = rng.gen_range(2..=4);
    let len = rng.gen_range(1..=4);
    let half: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n - 1)).collect();
    let mut blocks = random_blocks(rng, n);
    let mut flags = vec![blocks.flag()];
    for &k in &half {
        blocks.cross(rng, k);
        flags.push(blocks.flag());
    }
    let word: Vec<usize> = half.iter().chain(half.iter().rev()).copied().collect();
    let sectors: Vec<Vec<Subspace>> = flags[..len].iter().chain(flags[1..].iter().rev()).cloned().collect();
    let front = FrontDiagram::from_word(n, &word).unwrap();
    FrontSheaf::from_sector_flags(front, &sectors, true).unwrap()
}

fn unipotent(rng: &mut ChaCha8Rng, n: usize, range: std::ops::RangeInclusive<i64>) -> EulerLattice {
    let mut g = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = BigInt::one();
        for x in &mut row[i + 1..] {
            *x = BigInt::from(rng.gen_range(range.clone()));
        }
    }
    EulerLattice::new(g).unwrap()
}

/// Closed mutation chain on a combinatorial front; `None` if a slot has no period.
fn random_schober(rng: &mut ChaCha8Rng, max_crossings: usize) -> Option<StokesSchoberShadow> {
    let n = rng.gen_range(2..=4);
    let lattice = unipotent(rng, n, -1..=1);
    let init: Vec<Vec<LatticeVector>> = (0..n).map(|i| vec![lattice.basis_vector(i)]).collect();
    let slots: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..n - 1)).collect();
    match StokesSchoberShadow::closed_from_slots(lattice, init, &slots, 6) {
        Ok(s) if s.front().crossing_count() <= max_crossings => Some(s),
        Ok(_) | Err(SchoberError::NoPeriod(..)) => None,
        Err(e) => panic!("unexpected: {e}"),
    }
}

fn local_constancy_failures(s: &FrontSheaf) -> Vec<String> {
    let mut out = Vec::new();
    if !validate_front_sheaf(s).pass {
        out.push("generated sheaf invalid".into());
        return out;
    }
    let front = s.front();
    for (x, c) in front.crossings().iter().enumerate() {
        for p in [c.slot, c.slot + 1] {
            let strand = front.sector_orders()[x][p];
            match transport(s, x, strand) {
                Ok(t) if is_invertible(&t) => {}
                _ => out.push(format!("transport at crossing {x} strand {strand}")),
            }
        }
    }
    for comp in 0..front.components().len() {
        let base = monodromy(s, comp).unwrap().charpoly().unwrap();
        for (j, p) in base_points(s, comp).unwrap() {
            if monodromy_from(s, j, p).unwrap().charpoly().unwrap() != base {
                out.push(format!("component {comp} base ({j},{p})"));
            }
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut instances, mut failures, mut merged) = (0, Vec::new(), 0);
    while instances < 500 {
        let s = if instances % 2 == 0 {
            random_there_and_back(&mut rng)
        } else {
            match random_schober(&mut rng, 8) {
                Some(sh) => decategorify_schober(&sh).unwrap(),
                None => continue,
            }
        };
        if s.front().components().len() < s.front().strands() {
            merged += 1;
        }
        failures.extend(local_constancy_failures(&s));
        instances += 1;
    }
    let took = start.elapsed();
    outcome(
        failures.is_empty() && took < Duration::from_secs(30),
        format!(
            "{instances} sheaves ({merged} with multi-strand components), {} failures, {}",
            failures.len(),
            ms(took)
        ),
    )
}

// ---------------------------------------------------------------------------
// 5

fn random_exceptional(rng: &mut ChaCha8Rng, n: usize) -> ExceptionalSequence {
    let base = ExceptionalSequence::standard(unipotent(rng, n, -3..=3)).unwrap();
    let word: Vec<BraidLetter> = (0..rng.gen_range(0..4))
        .map(|_| BraidLetter {
            index: rng.gen_range(1..n),
            inverse: rng.gen_bool(0.5),
        })
        .collect();
    apply_braid_word(&base, &word).unwrap()
}

fn word(seq: &ExceptionalSequence, letters: &[(usize, bool)]) -> ExceptionalSequence {
    let w: Vec<BraidLetter> = letters.iter().map(|&(index, inverse)| BraidLetter { index, inverse }).collect();
    apply_braid_word(seq, &w).unwrap()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0;
    let trials = 1000;
    for t in 0..trials {
        let n = if t % 2 == 0 { 3 } else { 4 };
        let s = random_exceptional(&mut rng, n);
        for i in 1..n - 1 {
            for inv in [false, true] {
                if word(&s, &[(i, inv), (i + 1, inv), (i, inv)]) != word(&s, &[(i + 1, inv), (i, inv), (i + 1, inv)]) {
                    failures += 1;
                }
            }
        }
        if n == 4 && word(&s, &[(1, false), (3, false)]) != word(&s, &[(3, false), (1, false)]) {
            failures += 1;
        }
        for i in 1..n {
            let l = pair_left_mutation(&s, i).unwrap();
            if pair_right_mutation(&l, i).unwrap() != s {
                failures += 1;
            }
        }
    }
    let took = start.elapsed();
    outcome(
        failures == 0 && took < Duration::from_secs(10),
        format!("{trials} sequences (ranks 3 and 4), {failures} failures, {}", ms(took)),
    )
}

// ---------------------------------------------------------------------------
// 6

/// Direct iteration on a pair of lines, comparing lines up to scale.
fn oracle_period(a: i64, max: usize) -> Option<usize> {
    let chi = |x: &[BigInt; 2], y: &[BigInt; 2]| &x[0] * &y[0] + BigInt::from(a) * &x[0] * &y[1] + &x[1] * &y[1];
    let parallel = |x: &[BigInt; 2], y: &[BigInt; 2]| &x[0] * &y[1] == &x[1] * &y[0];
    let (x0, y0) = ([BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]);
    let (mut x, mut y) = (x0.clone(), y0.clone());
    for k in 1..=max {
        let c = chi(&x, &y);
        let nx = [&y[0] - &c * &x[0], &y[1] - &c * &x[1]];
        y = x;
        x = nx;
        if parallel(&x, &x0) && parallel(&y, &y0) {
            return Some(k);
        }
    }
    None
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (a, want) in [(0, Some(2)), (1, Some(3)), (2, None)] {
        let lattice = EulerLattice::from_ints(&[&[1, a], &[0, 1]]).unwrap();
        let pair = SODPair::new(lattice.clone(), vec![lattice.basis_vector(0)], vec![lattice.basis_vector(1)]).unwrap();
        let got = mutation_period(&pair, 100).unwrap();
        let oracle = oracle_period(a, 100);
        pass &= got == want && oracle == want;
        parts.push(format!("χ={a}: {got:?} (oracle {oracle:?})"));
    }
    // One explicit step against the closed form.
    let lattice = EulerLattice::from_ints(&[&[1, 1], &[0, 1]]).unwrap();
    let pair = SODPair::new(lattice.clone(), vec![lattice.basis_vector(0)], vec![lattice.basis_vector(1)]).unwrap();
    let step = block_left_mutation(&pair).unwrap();
    pass &= step.block_a()[0] == vec![BigInt::from(-1), BigInt::from(1)];
    outcome(pass, parts.join(", "))
}

// ---------------------------------------------------------------------------
// 7

fn random_line_instance(rng: &mut ChaCha8Rng) -> (Vec<Subspace>, Vec<Coorientation>) {
    let ambient = 5;
    let points = rng.gen_range(1..=6);
    let mut current: Vec<Vec<Scalar>> = (0..rng.gen_range(0..=3)).map(|_| random_vec(rng, ambient)).collect();
    let mut filtration = vec![Subspace::span(ambient, &current)];
    let mut coors = Vec::new();
    for _ in 0..points {
        let c = if rng.gen_bool(0.5) { Coorientation::Negative } else { Coorientation::Positive };
        match c {
            Coorientation::Negative => {
                for _ in 0..rng.gen_range(0..=2) {
                    current.push(random_vec(rng, ambient));
                }
            }
            Coorientation::Positive => {
                let basis = filtration.last().unwrap().basis_vectors();
                let keep = rng.gen_range(0..=basis.len());
                // A random subspace of the current one.
                current = (0..keep)
                    .map(|_| {
                        let mut v = vec![Scalar::zero(); ambient];
                        for b in &basis {
                            let c = s(rng.gen_range(-2..3));
                            for (vi, bi) in v.iter_mut().zip(b) {
                                *vi += &(&c * bi);
                            }
                        }
                        v
                    })
                    .collect();
            }
        }
        filtration.push(Subspace::span(ambient, &current));
        coors.push(c);
    }
    (filtration, coors)
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut line_failures = 0;
    for _ in 0..200 {
        let (filtration, coors) = random_line_instance(&mut rng);
        let sheaf = decategorify_line(&filtration, &coors).unwrap();
        if !validate_line(&sheaf.points(), &sheaf).unwrap().pass {
            line_failures += 1;
        }
    }
    let (mut schobers, mut schober_failures) = (0, 0);
    while schobers < 200 {
        let Some(shadow) = random_schober(&mut rng, usize::MAX) else { continue };
        schobers += 1;
        match decategorify_schober(&shadow) {
            Ok(s) if validate_front_sheaf(&s).pass => {}
            _ => schober_failures += 1,
        }
    }
    outcome(
        line_failures == 0 && schober_failures == 0,
        format!("line: 200 inputs, {line_failures} failures; schober: {schobers} inputs, {schober_failures} failures"),
    )
}

// ---------------------------------------------------------------------------
// 8

fn doubling_sheaf() -> FrontSheaf {
    let front = FrontDiagram::build(&FormalType::parse_all(&["0", "z^(-2)"]).unwrap(), &eps()).unwrap();
    let line = |x: i64, y: i64| Subspace::span(2, &[vec![s(x), s(y)]]);
    let lines = [line(1, 0), line(0, 1), line(1, 1), line(1, -1)];
    let flags: Vec<Vec<Subspace>> = lines.iter().map(|l| vec![Subspace::zero(2), l.clone(), Subspace::full(2)]).collect();
    FrontSheaf::from_sector_flags(front, &flags, true).unwrap()
}

fn criterion_8() -> Outcome {
    let sheaf = doubling_sheaf();
    let zero = sheaf.front().zero_strands()[0];
    let m = monodromy(&sheaf, sheaf.front().component_of(zero).unwrap()).unwrap();
    let one = |x: i64| ExactMatrix::from_ints(&[&[x]]);
    let good = IrregularGluing {
        sheaf: sheaf.clone(),
        zero_strand: zero,
        v_dim: 1,
        f: one(1),
        g: one(-1),
    };
    let bad = IrregularGluing { g: one(1), ..good.clone() };
    let rg = validate_irregular_gluing(&good).unwrap();
    let rb = validate_irregular_gluing(&bad).unwrap();
    let locations: Vec<&str> = rb.failures.iter().map(|f| f.location.as_str()).collect();
    outcome(
        m == one(2) && rg.pass && !rb.pass && rb.failed_at("id-gf"),
        format!("M = {:?}, g=[-1] pass={}, g=[1] pass={} at {locations:?}", m[(0, 0)], rg.pass, rb.pass),
    )
}

// ---------------------------------------------------------------------------
// 9

fn demo_outputs(dir: &Path, threads: Option<usize>) -> Vec<Vec<u8>> {
    let bin = env!("CARGO_BIN_EXE_lkcat");
    let mut runs: Vec<Vec<String>> = vec![vec!["demo".into(), "airy".into()]];
    for n in 2..=6 {
        runs.push(vec!["demo".into(), "spherical".into(), n.to_string(), "--svg".into(), format!("s{n}.svg")]);
    }
    let mut out = Vec::new();
    for args in runs {
        let mut cmd = Command::new(bin);
        cmd.args(&args).current_dir(dir);
        if let Some(t) = threads {
            cmd.env("RAYON_NUM_THREADS", t.to_string());
        }
        let o = cmd.output().unwrap();
        out.push(o.status.code().unwrap_or(-1).to_string().into_bytes());
        out.push(o.stdout);
    }
    out.push(std::fs::read(dir.join("airy.svg")).unwrap());
    for n in 2..=6 {
        out.push(std::fs::read(dir.join(format!("s{n}.svg"))).unwrap());
    }
    out
}

fn criterion_9() -> Outcome {
    let mut all = Vec::new();
    for threads in [Some(1), Some(1), Some(4), Some(4), None] {
        let dir = tempfile::tempdir().unwrap();
        all.push(demo_outputs(dir.path(), threads));
    }
    let identical = all.windows(2).all(|w| w[0] == w[1]);
    let bytes: usize = all[0].iter().map(|b| b.len()).sum();
    outcome(
        identical,
        format!("6 demos x 5 runs (threads 1,1,4,4,default), {bytes} bytes per run, identical={identical}"),
    )
}

fn main() {
    let mut unexpected = Vec::new();
    let mut report = |id: u32, name: &str, o: Outcome, expected_pass: bool| {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = if o.pass == expected_pass { "" } else { " [UNEXPECTED]" };
        println!("criterion {id} [{name}]: {verdict} - {}{note}", o.detail);
        if o.pass != expected_pass {
            unexpected.push(id);
        }
    };
    report(1, "airy front", criterion_1(), true);
    let (c2, as_recorded) = criterion_2();
    // Recorded expectation: FAIL, only through the N = 1 normalization.
    report(2, "2N-crossing law", c2, !as_recorded);
    report(3, "crossing exactness validator", criterion_3(), true);
    report(4, "microstalk local constancy", criterion_4(), true);
    report(5, "braid relations", criterion_5(), true);
    report(6, "mutation periods", criterion_6(), true);
    report(7, "round trips", criterion_7(), true);
    report(8, "irregular gluing", criterion_8(), true);
    report(9, "determinism", criterion_9(), true);
    if !unexpected.is_empty() {
        eprintln!("unexpected outcomes: {unexpected:?}");
        std::process::exit(1);
    }
}
