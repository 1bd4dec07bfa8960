//! Weighted least-squares embedding trainer.
//!
//! Minimizes  Σ f(x_ij) (w_i·w̃_j + b_i + b̃_j − ln x_ij)²  over the records
//! of a co-occurrence table with per-parameter adaptive steps (AdaGrad).
//! Deterministic mode is single-threaded with a seeded record shuffle per
//! pass; concurrent mode lets threads update shared parameters without
//! synchronization (stale reads are tolerated) and is nondeterministic.

use std::io::Write;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cooccur::{CoocRecord, CooccurrenceTable};
use crate::error::{Error, Result};
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dimension: usize,
    pub window: usize,
    pub min_count: u64,
    pub x_max: f64,
    pub alpha: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub symmetric_context: bool,
    /// Single-threaded seeded-shuffle updates; bit-reproducible.
    pub deterministic: bool,
    /// Worker count for concurrent (nondeterministic) training; ignored in
    /// deterministic mode.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dimension: 100,
            window: 2,
            min_count: 10,
            x_max: 100.0,
            alpha: 0.75,
            iterations: 15,
            learning_rate: 0.05,
            seed: 1,
            symmetric_context: true,
            deterministic: true,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.dimension < 1 {
            return fail("dimension must be >= 1");
        }
        if self.window < 1 {
            return fail("window must be >= 1");
        }
        if self.min_count < 1 {
            return fail("min_count must be >= 1");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return fail("alpha must be in (0, 1]");
        }
        if !(self.learning_rate > 0.0) {
            return fail("learning_rate must be positive");
        }
        if !(self.x_max > 0.0) {
            return fail("x_max must be positive");
        }
        if self.iterations < 1 {
            return fail("iterations must be >= 1");
        }
        if self.threads < 1 {
            return fail("threads must be >= 1");
        }
        Ok(())
    }
}

/// Word vectors, context vectors and biases. Matrices are row-major
/// `vocab_size × dimension`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub dimension: usize,
    pub vocab_size: usize,
    pub w: Vec<f64>,
    pub w_ctx: Vec<f64>,
    pub b: Vec<f64>,
    pub b_ctx: Vec<f64>,
    /// Exact mean loss evaluated after each full pass.
    pub loss_history: Vec<f64>,
}

impl EmbeddingModel {
    /// All parameters drawn uniformly from (−0.5/d, 0.5/d), in the fixed
    /// order w, w_ctx, b, b_ctx.
    pub fn init<R: Rng>(vocab_size: usize, dimension: usize, rng: &mut R) -> Self {
        let d = dimension as f64;
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n).map(|_| (rng.gen::<f64>() - 0.5) / d).collect()
        };
        EmbeddingModel {
            dimension,
            vocab_size,
            w: draw(vocab_size * dimension),
            w_ctx: draw(vocab_size * dimension),
            b: draw(vocab_size),
            b_ctx: draw(vocab_size),
            loss_history: Vec::new(),
        }
    }

    pub fn w_row(&self, i: u32) -> &[f64] {
        let d = self.dimension;
        &self.w[i as usize * d..(i as usize + 1) * d]
    }

    pub fn w_ctx_row(&self, j: u32) -> &[f64] {
        let d = self.dimension;
        &self.w_ctx[j as usize * d..(j as usize + 1) * d]
    }

    /// Exported representation of word `i`: w_i + w̃_i.
    pub fn combined_vector(&self, i: u32) -> Vec<f64> {
        self.w_row(i)
            .iter()
            .zip(self.w_ctx_row(i))
            .map(|(a, b)| a + b)
            .collect()
    }

    pub fn final_mean_loss(&self) -> Option<f64> {
        self.loss_history.last().copied()
    }

    pub fn all_finite(&self) -> bool {
        self.w
            .iter()
            .chain(&self.w_ctx)
            .chain(&self.b)
            .chain(&self.b_ctx)
            .all(|v| v.is_finite())
    }

    fn check_table(&self, table: &CooccurrenceTable) -> Result<()> {
        if let Some(max_id) = table.max_id() {
            if max_id as usize >= self.vocab_size {
                return Err(Error::DimensionMismatch(format!(
                    "table references word id {max_id} but model holds {} words",
                    self.vocab_size
                )));
            }
        }
        Ok(())
    }
}

/// GloVe weighting f(x): (x/x_max)^alpha below the cap, 1 at or above it.
pub fn weighting(x: f64, x_max: f64, alpha: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonPositiveCount(x));
    }
    Ok(weighting_unchecked(x, x_max, alpha))
}

fn weighting_unchecked(x: f64, x_max: f64, alpha: f64) -> f64 {
    if x < x_max {
        (x / x_max).powf(alpha)
    } else {
        1.0
    }
}

fn residual(model: &EmbeddingModel, r: &CoocRecord) -> f64 {
    let (i, j) = (r.i as usize, r.j as usize);
    let d = model.dimension;
    let mut dot = model.b[i] + model.b_ctx[j];
    for k in 0..d {
        dot += model.w[i * d + k] * model.w_ctx[j * d + k];
    }
    dot - r.x.ln()
}

/// Total weighted squared error over the table.
pub fn glove_loss(model: &EmbeddingModel, table: &CooccurrenceTable, cfg: &TrainConfig) -> Result<f64> {
    if cfg.dimension != model.dimension {
        return Err(Error::DimensionMismatch(format!(
            "config dimension {} but model dimension {}",
            cfg.dimension, model.dimension
        )));
    }
    model.check_table(table)?;
    let mut total = 0.0;
    for r in table.records() {
        let f = weighting_unchecked(r.x, cfg.x_max, cfg.alpha);
        let diff = residual(model, r);
        total += f * diff * diff;
    }
    Ok(total)
}

/// Partial derivatives of one record's loss term.
#[derive(Debug, Clone, PartialEq)]
pub struct GloveGradient {
    pub w_i: Vec<f64>,
    pub w_ctx_j: Vec<f64>,
    pub b_i: f64,
    pub b_ctx_j: f64,
}

/// Analytic gradient of  f(x) (w_i·w̃_j + b_i + b̃_j − ln x)²  with respect
/// to w_i, w̃_j, b_i, b̃_j.
pub fn glove_gradient(model: &EmbeddingModel, record: &CoocRecord, cfg: &TrainConfig) -> GloveGradient {
    debug_assert!(record.x > 0.0);
    let f = weighting_unchecked(record.x, cfg.x_max, cfg.alpha);
    let g = 2.0 * f * residual(model, record);
    GloveGradient {
        w_i: model.w_ctx_row(record.j).iter().map(|v| g * v).collect(),
        w_ctx_j: model.w_row(record.i).iter().map(|v| g * v).collect(),
        b_i: g,
        b_ctx_j: g,
    }
}

struct GradSquares {
    w: Vec<f64>,
    w_ctx: Vec<f64>,
    b: Vec<f64>,
    b_ctx: Vec<f64>,
}

impl GradSquares {
    fn new(vocab_size: usize, dimension: usize) -> Self {
        GradSquares {
            w: vec![1.0; vocab_size * dimension],
            w_ctx: vec![1.0; vocab_size * dimension],
            b: vec![1.0; vocab_size],
            b_ctx: vec![1.0; vocab_size],
        }
    }
}

/// One AdaGrad update; returns this record's weighted squared error before
/// the update. Steps divide by the accumulator as read before adding the
/// fresh squared gradient.
fn update_record(
    model: &mut EmbeddingModel,
    gradsq: &mut GradSquares,
    r: &CoocRecord,
    cfg: &TrainConfig,
) -> f64 {
    let d = model.dimension;
    let (i, j) = (r.i as usize, r.j as usize);
    let f = weighting_unchecked(r.x, cfg.x_max, cfg.alpha);
    let mut dot = model.b[i] + model.b_ctx[j];
    for k in 0..d {
        dot += model.w[i * d + k] * model.w_ctx[j * d + k];
    }
    let diff = dot - r.x.ln();
    let cost = f * diff * diff;
    let g = 2.0 * f * diff;
    let lr = cfg.learning_rate;
    for k in 0..d {
        let (wi, wj) = (i * d + k, j * d + k);
        let gw = g * model.w_ctx[wj];
        let gc = g * model.w[wi];
        model.w[wi] -= lr * gw / gradsq.w[wi].sqrt();
        model.w_ctx[wj] -= lr * gc / gradsq.w_ctx[wj].sqrt();
        gradsq.w[wi] += gw * gw;
        gradsq.w_ctx[wj] += gc * gc;
    }
    model.b[i] -= lr * g / gradsq.b[i].sqrt();
    model.b_ctx[j] -= lr * g / gradsq.b_ctx[j].sqrt();
    gradsq.b[i] += g * g;
    gradsq.b_ctx[j] += g * g;
    cost
}

fn first_nonfinite_record(model: &EmbeddingModel, table: &CooccurrenceTable, cfg: &TrainConfig) -> (u32, u32) {
    for r in table.records() {
        let f = weighting_unchecked(r.x, cfg.x_max, cfg.alpha);
        let diff = residual(model, r);
        if !(f * diff * diff).is_finite() {
            return (r.i, r.j);
        }
    }
    let r = &table.records()[0];
    (r.i, r.j)
}

/// Fits a model to the table. Initialization and shuffle order flow from
/// `cfg.seed`; in deterministic mode two runs with equal inputs produce
/// bit-identical models.
pub fn train(table: &CooccurrenceTable, vocab_size: usize, cfg: &TrainConfig) -> Result<EmbeddingModel> {
    cfg.validate()?;
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = EmbeddingModel::init(vocab_size, cfg.dimension, &mut rng);
    model.check_table(table)?;
    let n = table.records().len();
    let mut order: Vec<usize> = (0..n).collect();
    if cfg.deterministic || cfg.threads == 1 {
        let mut gradsq = GradSquares::new(vocab_size, cfg.dimension);
        for it in 0..cfg.iterations {
            order.shuffle(&mut rng);
            for &ri in &order {
                let r = &table.records()[ri];
                let cost = update_record(&mut model, &mut gradsq, r, cfg);
                if !cost.is_finite() {
                    return Err(Error::NonFiniteLoss {
                        iteration: it,
                        i: r.i,
                        j: r.j,
                    });
                }
            }
            let mean = glove_loss(&model, table, cfg)? / n as f64;
            if !mean.is_finite() {
                let (i, j) = first_nonfinite_record(&model, table, cfg);
                return Err(Error::NonFiniteLoss { iteration: it, i, j });
            }
            log::debug!("pass {}: mean loss {mean:.6}", it + 1);
            model.loss_history.push(mean);
        }
    } else {
        train_hogwild(table, &mut model, cfg, &mut rng, &mut order)?;
    }
    Ok(model)
}

fn to_atomic(values: &[f64]) -> Vec<AtomicU64> {
    values.iter().map(|v| AtomicU64::new(v.to_bits())).collect()
}

fn from_atomic(values: &[AtomicU64], out: &mut [f64]) {
    for (a, o) in values.iter().zip(out) {
        *o = f64::from_bits(a.load(Ordering::Relaxed));
    }
}

#[inline]
fn aload(a: &AtomicU64) -> f64 {
    f64::from_bits(a.load(Ordering::Relaxed))
}

#[inline]
fn astore(a: &AtomicU64, v: f64) {
    a.store(v.to_bits(), Ordering::Relaxed);
}

struct SharedParams {
    w: Vec<AtomicU64>,
    w_ctx: Vec<AtomicU64>,
    b: Vec<AtomicU64>,
    b_ctx: Vec<AtomicU64>,
    gw: Vec<AtomicU64>,
    gw_ctx: Vec<AtomicU64>,
    gb: Vec<AtomicU64>,
    gb_ctx: Vec<AtomicU64>,
}

/// Racy read-modify-write on shared parameters: concurrent threads may act
/// on stale values and overwrite each other. Tolerated by contract.
fn update_record_shared(shared: &SharedParams, d: usize, r: &CoocRecord, cfg: &TrainConfig) -> f64 {
    let (i, j) = (r.i as usize, r.j as usize);
    let f = weighting_unchecked(r.x, cfg.x_max, cfg.alpha);
    let mut dot = aload(&shared.b[i]) + aload(&shared.b_ctx[j]);
    for k in 0..d {
        dot += aload(&shared.w[i * d + k]) * aload(&shared.w_ctx[j * d + k]);
    }
    let diff = dot - r.x.ln();
    let cost = f * diff * diff;
    let g = 2.0 * f * diff;
    let lr = cfg.learning_rate;
    for k in 0..d {
        let (wi, wj) = (i * d + k, j * d + k);
        let (w, c) = (aload(&shared.w[wi]), aload(&shared.w_ctx[wj]));
        let gw = g * c;
        let gc = g * w;
        let (aw, ac) = (aload(&shared.gw[wi]), aload(&shared.gw_ctx[wj]));
        astore(&shared.w[wi], w - lr * gw / aw.sqrt());
        astore(&shared.w_ctx[wj], c - lr * gc / ac.sqrt());
        astore(&shared.gw[wi], aw + gw * gw);
        astore(&shared.gw_ctx[wj], ac + gc * gc);
    }
    let (bi, bj) = (aload(&shared.b[i]), aload(&shared.b_ctx[j]));
    let (abi, abj) = (aload(&shared.gb[i]), aload(&shared.gb_ctx[j]));
    astore(&shared.b[i], bi - lr * g / abi.sqrt());
    astore(&shared.b_ctx[j], bj - lr * g / abj.sqrt());
    astore(&shared.gb[i], abi + g * g);
    astore(&shared.gb_ctx[j], abj + g * g);
    cost
}

fn train_hogwild(
    table: &CooccurrenceTable,
    model: &mut EmbeddingModel,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
    order: &mut Vec<usize>,
) -> Result<()> {
    let d = cfg.dimension;
    let v = model.vocab_size;
    let shared = SharedParams {
        w: to_atomic(&model.w),
        w_ctx: to_atomic(&model.w_ctx),
        b: to_atomic(&model.b),
        b_ctx: to_atomic(&model.b_ctx),
        gw: to_atomic(&vec![1.0; v * d]),
        gw_ctx: to_atomic(&vec![1.0; v * d]),
        gb: to_atomic(&vec![1.0; v]),
        gb_ctx: to_atomic(&vec![1.0; v]),
    };
    let n = order.len();
    for it in 0..cfg.iterations {
        order.shuffle(rng);
        let chunk = n.div_ceil(cfg.threads).max(1);
        let bad = std::thread::scope(|scope| {
            let shared = &shared;
            let handles: Vec<_> = order
                .chunks(chunk)
                .map(|shard| {
                    scope.spawn(move || {
                        for &ri in shard {
                            let r = &table.records()[ri];
                            if !update_record_shared(shared, d, r, cfg).is_finite() {
                                return Some((r.i, r.j));
                            }
                        }
                        None
                    })
                })
                .collect();
            handles
                .into_iter()
                .filter_map(|h| h.join().unwrap())
                .next()
        });
        if let Some((i, j)) = bad {
            return Err(Error::NonFiniteLoss { iteration: it, i, j });
        }
        from_atomic(&shared.w, &mut model.w);
        from_atomic(&shared.w_ctx, &mut model.w_ctx);
        from_atomic(&shared.b, &mut model.b);
        from_atomic(&shared.b_ctx, &mut model.b_ctx);
        let mean = glove_loss(model, table, cfg)? / n as f64;
        if !mean.is_finite() {
            let (i, j) = first_nonfinite_record(model, table, cfg);
            return Err(Error::NonFiniteLoss { iteration: it, i, j });
        }
        log::debug!("pass {} (concurrent): mean loss {mean:.6}", it + 1);
        model.loss_history.push(mean);
    }
    Ok(())
}

/// Writes one line per word in vocabulary id order: the word and d values
/// at 6 decimal places, space separated. The exported vector is w + w̃.
pub fn export_vectors<W: Write>(model: &EmbeddingModel, vocab: &Vocabulary, mut out: W) -> Result<()> {
    if vocab.len() != model.vocab_size {
        return Err(Error::DimensionMismatch(format!(
            "vocabulary holds {} words but model holds {}",
            vocab.len(),
            model.vocab_size
        )));
    }
    for id in 0..vocab.len() as u32 {
        out.write_all(vocab.word(id).as_bytes())?;
        for value in model.combined_vector(id) {
            write!(out, " {value:.6}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::build_vocabulary;

    fn cfg(dimension: usize) -> TrainConfig {
        TrainConfig {
            dimension,
            ..TrainConfig::default()
        }
    }

    fn table(records: Vec<(u32, u32, f64)>) -> CooccurrenceTable {
        CooccurrenceTable::from_records(
            records
                .into_iter()
                .map(|(i, j, x)| CoocRecord { i, j, x })
                .collect(),
        )
        .unwrap()
    }

    fn cosine(u: &[f64], v: &[f64]) -> f64 {
        let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        dot / (nu * nv)
    }

    #[test]
    fn weighting_cap_and_power() {
        assert_eq!(weighting(100.0, 100.0, 0.75).unwrap(), 1.0);
        assert_eq!(weighting(1000.0, 100.0, 0.75).unwrap(), 1.0);
        let w = weighting(25.0, 100.0, 0.75).unwrap();
        assert!((w - 0.25f64.powf(0.75)).abs() < 1e-15);
        assert!((w - 0.35355339059327373).abs() < 1e-12);
        assert!(matches!(
            weighting(0.0, 100.0, 0.75),
            Err(Error::NonPositiveCount(_))
        ));
        assert!(weighting(-3.0, 100.0, 0.75).is_err());
    }

    #[test]
    fn loss_zero_when_residual_vanishes() {
        let t = table(vec![(0, 1, 1.0)]);
        // ln 1 = 0, so zero parameters give zero residual.
        let model = EmbeddingModel {
            dimension: 2,
            vocab_size: 2,
            w: vec![0.0; 4],
            w_ctx: vec![0.0; 4],
            b: vec![0.0; 2],
            b_ctx: vec![0.0; 2],
            loss_history: Vec::new(),
        };
        assert_eq!(glove_loss(&model, &t, &cfg(2)).unwrap(), 0.0);
    }

    #[test]
    fn loss_is_additive_over_equal_terms() {
        // All parameters equal, so the (0,1) and (1,0) terms are identical.
        let model = EmbeddingModel {
            dimension: 2,
            vocab_size: 2,
            w: vec![0.3; 4],
            w_ctx: vec![0.3; 4],
            b: vec![0.1; 2],
            b_ctx: vec![0.1; 2],
            loss_history: Vec::new(),
        };
        let one = glove_loss(&model, &table(vec![(0, 1, 7.0)]), &cfg(2)).unwrap();
        let two = glove_loss(&model, &table(vec![(0, 1, 7.0), (1, 0, 7.0)]), &cfg(2)).unwrap();
        assert!(one > 0.0);
        assert_eq!(two, 2.0 * one);
    }

    #[test]
    fn loss_invariant_under_id_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let model = EmbeddingModel::init(5, 3, &mut rng);
        let records = vec![(0, 1, 3.0), (1, 2, 8.0), (3, 4, 2.5), (2, 0, 1.5)];
        let c = cfg(3);
        let base = glove_loss(&model, &table(records.clone()), &c).unwrap();
        // Swap ids 0 and 4 everywhere.
        let perm = |id: u32| match id {
            0 => 4,
            4 => 0,
            other => other,
        };
        let mut permuted = model.clone();
        for k in 0..3 {
            permuted.w.swap(k, 4 * 3 + k);
            permuted.w_ctx.swap(k, 4 * 3 + k);
        }
        permuted.b.swap(0, 4);
        permuted.b_ctx.swap(0, 4);
        let mapped = records
            .into_iter()
            .map(|(i, j, x)| (perm(i), perm(j), x))
            .collect();
        let swapped = glove_loss(&permuted, &table(mapped), &c).unwrap();
        assert!((base - swapped).abs() <= 1e-12 * base.abs());
    }

    #[test]
    fn loss_matches_model_dimension_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let model = EmbeddingModel::init(3, 4, &mut rng);
        let t = table(vec![(0, 1, 2.0)]);
        assert!(glove_loss(&model, &t, &cfg(5)).is_err());
        let oob = table(vec![(0, 3, 2.0)]);
        assert!(glove_loss(&model, &oob, &cfg(4)).is_err());
    }

    #[test]
    fn gradient_zero_at_stationary_residual() {
        let t = table(vec![(0, 1, 1.0)]);
        let model = EmbeddingModel {
            dimension: 3,
            vocab_size: 2,
            w: vec![0.0; 6],
            w_ctx: vec![0.0; 6],
            b: vec![0.0; 2],
            b_ctx: vec![0.0; 2],
            loss_history: Vec::new(),
        };
        let g = glove_gradient(&model, &t.records()[0], &cfg(3));
        assert_eq!(g.b_i, 0.0);
        assert_eq!(g.b_ctx_j, 0.0);
        assert!(g.w_i.iter().all(|&v| v == 0.0));
        assert!(g.w_ctx_j.iter().all(|&v| v == 0.0));
    }

    enum Slot {
        W(usize),
        WCtx(usize),
        B(usize),
        BCtx(usize),
    }

    fn param_mut<'a>(m: &'a mut EmbeddingModel, s: &Slot) -> &'a mut f64 {
        match *s {
            Slot::W(k) => &mut m.w[k],
            Slot::WCtx(k) => &mut m.w_ctx[k],
            Slot::B(k) => &mut m.b[k],
            Slot::BCtx(k) => &mut m.b_ctx[k],
        }
    }

    fn central_diff(
        model: &mut EmbeddingModel,
        t: &CooccurrenceTable,
        c: &TrainConfig,
        slot: Slot,
    ) -> f64 {
        let h = 1e-5;
        *param_mut(model, &slot) += h;
        let plus = glove_loss(model, t, c).unwrap();
        *param_mut(model, &slot) -= 2.0 * h;
        let minus = glove_loss(model, t, c).unwrap();
        *param_mut(model, &slot) += h;
        (plus - minus) / (2.0 * h)
    }

    #[test]
    fn gradient_matches_finite_differences_on_one_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut model = EmbeddingModel::init(4, 3, &mut rng);
        let c = cfg(3);
        let record = CoocRecord { i: 1, j: 2, x: 9.0 };
        let t = table(vec![(1, 2, 9.0)]);
        let analytic = glove_gradient(&model, &record, &c);
        let close = |approx: f64, exact: f64| (approx - exact).abs() <= 1e-5 * approx.abs().max(1.0);
        let approx = central_diff(&mut model, &t, &c, Slot::W(3));
        assert!(close(approx, analytic.w_i[0]));
        let approx = central_diff(&mut model, &t, &c, Slot::WCtx(2 * 3 + 1));
        assert!(close(approx, analytic.w_ctx_j[1]));
        let approx = central_diff(&mut model, &t, &c, Slot::B(1));
        assert!(close(approx, analytic.b_i));
        let approx = central_diff(&mut model, &t, &c, Slot::BCtx(2));
        assert!(close(approx, analytic.b_ctx_j));
    }

    /// p and q share an identical context distribution, r a disjoint one.
    fn similarity_table() -> CooccurrenceTable {
        // ids: p=0 q=1 r=2 contexts c1=3 c2=4 c3=5 c4=6
        let mut records = Vec::new();
        for (word, ctx) in [(0, 3), (0, 4), (1, 3), (1, 4), (2, 5), (2, 6)] {
            records.push((word, ctx, 10.0));
            records.push((ctx, word, 10.0));
        }
        table(records)
    }

    fn similarity_cfg() -> TrainConfig {
        TrainConfig {
            dimension: 25,
            iterations: 50,
            seed: 17,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn shared_contexts_beat_disjoint_contexts() {
        let model = train(&similarity_table(), 7, &similarity_cfg()).unwrap();
        let p = model.combined_vector(0);
        let q = model.combined_vector(1);
        let r = model.combined_vector(2);
        assert!(cosine(&p, &q) > cosine(&p, &r));
    }

    #[test]
    fn deterministic_mode_is_bit_reproducible() {
        let t = similarity_table();
        let c = similarity_cfg();
        let a = train(&t, 7, &c).unwrap();
        let b = train(&t, 7, &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn loss_decreases_from_first_to_last_pass() {
        let model = train(&similarity_table(), 7, &similarity_cfg()).unwrap();
        let first = model.loss_history.first().unwrap();
        let last = model.loss_history.last().unwrap();
        assert!(last < first, "loss did not improve: {first} -> {last}");
        assert!(model.all_finite());
    }

    #[test]
    fn empty_table_rejected() {
        let t = CooccurrenceTable::from_records(Vec::new()).unwrap();
        assert!(matches!(
            train(&t, 2, &cfg(2)),
            Err(Error::EmptyTable)
        ));
    }

    #[test]
    fn table_id_outside_vocab_rejected() {
        let t = table(vec![(0, 5, 2.0)]);
        assert!(matches!(
            train(&t, 3, &cfg(2)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn runaway_learning_rate_aborts_with_diagnostics() {
        let c = TrainConfig {
            dimension: 2,
            iterations: 5,
            learning_rate: 1e160,
            ..TrainConfig::default()
        };
        match train(&table(vec![(0, 1, 50.0), (1, 0, 50.0)]), 2, &c) {
            Err(Error::NonFiniteLoss { .. }) => {}
            other => panic!("expected non-finite loss abort, got {other:?}"),
        }
    }

    #[test]
    fn concurrent_mode_trains_to_similar_quality() {
        let c = TrainConfig {
            deterministic: false,
            threads: 3,
            ..similarity_cfg()
        };
        let model = train(&similarity_table(), 7, &c).unwrap();
        assert!(model.all_finite());
        assert_eq!(model.loss_history.len(), c.iterations);
        assert!(model.loss_history.last().unwrap() < model.loss_history.first().unwrap());
        let p = model.combined_vector(0);
        let q = model.combined_vector(1);
        let r = model.combined_vector(2);
        assert!(cosine(&p, &q) > cosine(&p, &r));
    }

    #[test]
    fn export_format_and_order() {
        let corpus = vec![Ok(vec!["b".to_string(), "a".to_string()]), Ok(vec!["a".to_string()])];
        let vocab = build_vocabulary(corpus, 1).unwrap();
        assert_eq!(vocab.word(0), "a");
        let model = EmbeddingModel {
            dimension: 3,
            vocab_size: 2,
            w: vec![0.25; 6],
            w_ctx: vec![0.25; 6],
            b: vec![0.0; 2],
            b_ctx: vec![0.0; 2],
            loss_history: Vec::new(),
        };
        let mut buf = Vec::new();
        export_vectors(&model, &vocab, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "a 0.500000 0.500000 0.500000\nb 0.500000 0.500000 0.500000\n");
    }

    #[test]
    fn export_requires_matching_sizes() {
        let vocab = build_vocabulary(vec![Ok(vec!["a".to_string()])], 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let model = EmbeddingModel::init(3, 2, &mut rng);
        assert!(export_vectors(&model, &vocab, Vec::new()).is_err());
    }

    #[test]
    fn config_validation() {
        let ok = TrainConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            TrainConfig { dimension: 0, ..ok.clone() },
            TrainConfig { window: 0, ..ok.clone() },
            TrainConfig { min_count: 0, ..ok.clone() },
            TrainConfig { alpha: 0.0, ..ok.clone() },
            TrainConfig { alpha: 1.5, ..ok.clone() },
            TrainConfig { learning_rate: 0.0, ..ok.clone() },
            TrainConfig { x_max: 0.0, ..ok.clone() },
            TrainConfig { iterations: 0, ..ok.clone() },
            TrainConfig { threads: 0, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
