//! Command-line front end. The binary is a thin wrapper around [`run`].

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::field::{Fel, FieldCtx};
use crate::hitting::{
    build_family, pit_witness, pit_witness_parallel, simulate_improper, simulate_proper, Family,
    MeasurementSet,
};
use crate::io;
use crate::lrr::{BPrimeConverter, DiagonalDecoder, TensorPlan};
use crate::rankcode::{build_code, build_code_simulated, RankMetricCode};
use crate::tensor::{DenseTensor, LowRankTensor};

#[derive(Parser, Debug)]
#[command(name = "lowrank", version, about = "Hitting sets, low-rank recovery and rank-metric codes")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Field characteristic
    #[arg(long)]
    p: u64,
    /// Extension degree
    #[arg(long, default_value_t = 1)]
    k: usize,
}

impl FieldArgs {
    fn ctx(&self) -> anyhow::Result<FieldCtx> {
        let base = FieldCtx::prime(self.p)?;
        Ok(if self.k == 1 { base } else { base.extension(self.k)? })
    }
}

#[derive(Args, Debug, Clone)]
struct SimArgs {
    /// Build the family over the degree-k extension and simulate it over the given field
    #[arg(long = "sim-ext")]
    sim_ext: Option<usize>,
    /// Use the rank-one (proper) simulation instead of coordinate splitting
    #[arg(long, requires = "sim_ext")]
    proper: bool,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Write a measurement-set file
    GenHit {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        family: Family,
        #[arg(long)]
        dims: String,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Test a tensor file against a hitting set built over its field
    Pit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        family: Family,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        sim: SimArgs,
        /// Evaluate measurements in parallel (same witness as the sequential scan)
        #[arg(long)]
        parallel: bool,
    },
    /// Write the syndromes of a rank <= r tensor for a recovery family
    Measure {
        #[arg(long)]
        input: PathBuf,
        /// Dprime, Bprime (matrices) or TensorB
        #[arg(long, default_value = "Dprime")]
        family: Family,
        #[arg(long)]
        r: usize,
        /// Measure over the degree-k extension of the tensor's field
        #[arg(long)]
        ext: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reconstruct a tensor from a syndrome file
    Recover {
        #[arg(long)]
        input: PathBuf,
        /// Write the result over the prime subfield of the syndrome field
        #[arg(long)]
        restrict: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Encode a message vector (a tensor file with one axis) into a codeword
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// Message file; a random message from --seed when absent
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decode a received word into a codeword
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the recovered error pattern
        #[arg(long)]
        error_output: Option<PathBuf>,
    },
    /// Run the exhaustive tiny-scale suites
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Time measure and recover on a grid of square matrices
    Bench {
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 2147483647)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
struct CodeArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    dims: String,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value = "Dprime")]
    family: Family,
    /// Build the parity family over the degree-k extension
    #[arg(long = "sim-ext")]
    sim_ext: Option<usize>,
}

impl CodeArgs {
    fn build(&self) -> anyhow::Result<RankMetricCode> {
        let ctx = self.field.ctx()?;
        let dims = io::parse_dims(&self.dims)?;
        Ok(match self.sim_ext {
            Some(e) => build_code_simulated(&ctx, e, &dims, self.r, self.family)?,
            None => build_code(&ctx, &dims, self.r, self.family)?,
        })
    }
}

/// Parses `args` (including the program name) and runs the verb. Returns the
/// process exit status: 0 success, 2 usage or input errors, 3 promise violations.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.verb) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(err) if err.is_promise_violation() => 3,
                _ => 2,
            }
        }
    }
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(output: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn family_set(
    ctx: &FieldCtx,
    family: Family,
    r: usize,
    dims: &[usize],
    sim: &SimArgs,
) -> anyhow::Result<MeasurementSet> {
    let Some(e) = sim.sim_ext else {
        return build_family(ctx, family, r, dims).map_err(|err| match err {
            Error::FieldTooSmall(msg) => {
                anyhow!("field too small ({msg}); retry with --sim-ext <k>")
            }
            other => other.into(),
        });
    };
    if !ctx.is_prime_field() {
        bail!("--sim-ext needs a prime base field");
    }
    let h = build_family(&ctx.extension(e)?, family, r, dims)?;
    Ok(if sim.proper { simulate_proper(&h)? } else { simulate_improper(&h)? })
}

fn dispatch(verb: Verb) -> anyhow::Result<i32> {
    match verb {
        Verb::GenHit { field, family, dims, r, sim, output } => {
            let ctx = field.ctx()?;
            let dims = io::parse_dims(&dims)?;
            let h = family_set(&ctx, family, r, &dims, &sim)?;
            emit(&output, &io::write_measurements(&h))?;
        }
        Verb::Pit { input, family, r, sim, parallel } => {
            let t = io::read_any_tensor(&read(&input)?)?;
            let h = family_set(t.ctx(), family, r, t.dims(), &sim)?;
            let w = if parallel { pit_witness_parallel(&t, &h)? } else { pit_witness(&t, &h)? };
            match w {
                Some(i) => println!("NONZERO witness={i}"),
                None => println!("ZERO"),
            }
        }
        Verb::Measure { input, family, r, ext, output } => {
            let t = io::read_any_tensor(&read(&input)?)?;
            let ctx = match ext {
                Some(e) => t.ctx().extension(e)?,
                None => t.ctx().clone(),
            };
            let values = measure(&ctx, family, r, &t)?;
            let file = io::SyndromeFile { ctx, family, r, dims: t.dims().to_vec(), values };
            emit(&output, &io::write_syndromes(&file))?;
        }
        Verb::Recover { input, restrict, output } => {
            let s = io::read_syndromes(&read(&input)?)?;
            let mut t = recover(&s)?;
            if restrict {
                t = t.restrict(&s.ctx.base_field())?;
            }
            emit(&output, &io::write_tensor(&t))?;
        }
        Verb::Encode { code, input, seed, output } => {
            let c = code.build()?;
            let msg: Vec<Fel> = match input {
                Some(p) => {
                    let m = io::read_tensor(&read(&p)?)?;
                    if m.ctx() != c.ctx() {
                        bail!("message field differs from the code field");
                    }
                    m.data().to_vec()
                }
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..c.dimension()).map(|_| c.ctx().random(&mut rng)).collect()
                }
            };
            emit(&output, &io::write_tensor(&c.encode(&msg)?))?;
        }
        Verb::Decode { code, input, output, error_output } => {
            let c = code.build()?;
            let received = io::read_tensor(&read(&input)?)?;
            let d = c.decode(&received)?;
            if let Some(p) = &error_output {
                emit(&Some(p.clone()), &io::write_tensor(&d.error))?;
            }
            emit(&output, &io::write_tensor(&d.codeword))?;
        }
        Verb::Selftest { seed } => {
            let mut failed = false;
            for (name, ok) in selftest(seed) {
                println!("{} {name}", if ok { "PASS" } else { "FAIL" });
                failed |= !ok;
            }
            return Ok(if failed { 1 } else { 0 });
        }
        Verb::Bench { r, sizes, trials, p, seed } => {
            let ctx = FieldCtx::prime(p)?;
            let rows = bench_grid(&ctx, &sizes, r, trials, seed)?;
            println!("{:>6} {:>6} {:>3} {:>12} {:>12}", "n", "m", "r", "measure_ms", "recover_ms");
            for row in rows {
                println!(
                    "{:>6} {:>6} {:>3} {:>12.3} {:>12.3}",
                    row.n, row.m, row.r, row.measure_ms, row.recover_ms
                );
            }
        }
    }
    Ok(0)
}

fn measure(ctx: &FieldCtx, family: Family, r: usize, t: &DenseTensor) -> anyhow::Result<Vec<Fel>> {
    let dims = t.dims();
    Ok(match (family, dims) {
        (Family::Dprime, &[n, m]) => DiagonalDecoder::new(ctx, n, m, r)?.measure(t)?,
        (Family::Bprime, &[n, m]) => BPrimeConverter::new(ctx, n, m, r)?.measure(t)?,
        (Family::TensorB, _) => TensorPlan::new(ctx, dims.len(), dims[0], r)?.measure(t)?,
        _ => bail!("measure supports Dprime/Bprime on matrices and TensorB, not {family} on {dims:?}"),
    })
}

fn recover(s: &io::SyndromeFile) -> anyhow::Result<DenseTensor> {
    let ctx = &s.ctx;
    Ok(match (s.family, s.dims.as_slice()) {
        (Family::Dprime, &[n, m]) => DiagonalDecoder::new(ctx, n, m, s.r)?.recover(&s.values)?,
        (Family::Bprime, &[n, m]) => {
            let ys = BPrimeConverter::new(ctx, n, m, s.r)?.convert(&s.values)?;
            DiagonalDecoder::new(ctx, n, m, s.r)?.recover(&ys)?
        }
        (Family::TensorB, dims) => {
            if dims.iter().any(|&x| x != dims[0]) {
                bail!("TensorB needs equal axis lengths");
            }
            TensorPlan::new(ctx, dims.len(), dims[0], s.r)?.recover(&s.values)?
        }
        (family, dims) => bail!("cannot recover family {family} with dims {dims:?}"),
    })
}

/// One row of the benchmark table; times are medians over trials.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub measure_ms: f64,
    pub recover_ms: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.get(v.len() / 2).copied().unwrap_or(0.0)
}

/// Times `D'` measurement and recovery of random rank-`r` square matrices.
pub fn bench_grid(
    ctx: &FieldCtx,
    sizes: &[usize],
    r: usize,
    trials: usize,
    seed: u64,
) -> crate::Result<Vec<BenchRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let dec = DiagonalDecoder::new(ctx, n, n, r)?;
        let (mut tm, mut tr) = (Vec::new(), Vec::new());
        for _ in 0..trials.max(1) {
            let m = LowRankTensor::random(ctx, &[n, n], r, &mut rng).expand();
            let t0 = Instant::now();
            let ys = dec.measure(&m)?;
            let t1 = Instant::now();
            let back = dec.recover(&ys)?;
            let t2 = Instant::now();
            if back != m {
                return Err(Error::DecodeFailure(format!("bench recovery mismatch at n={n}")));
            }
            tm.push((t1 - t0).as_secs_f64() * 1e3);
            tr.push((t2 - t1).as_secs_f64() * 1e3);
        }
        rows.push(BenchRow { n, m: n, r, measure_ms: median(tm), recover_ms: median(tr) });
    }
    Ok(rows)
}

/// Named checks run by the `selftest` verb.
pub fn selftest(seed: u64) -> Vec<(&'static str, bool)> {
    vec![
        ("pit_rank1_3x3_gf2_simulated", st_pit_gf2().unwrap_or(false)),
        ("prony_exhaustive_gf7", st_prony().unwrap_or(false)),
        ("lrr_roundtrip_dprime_bprime", st_lrr(seed).unwrap_or(false)),
        ("tensor_roundtrip", st_tensor(seed).unwrap_or(false)),
        ("code_distance_3x3_gf7", st_code().unwrap_or(false)),
    ]
}

fn st_pit_gf2() -> crate::Result<bool> {
    let f = FieldCtx::prime(2)?;
    let ext = f.extension(3)?;
    let h = simulate_improper(&crate::hitting::hitting_set_d(&ext, 1, 3, 3)?)?;
    for u in 1..8u64 {
        for v in 1..8u64 {
            let bits = |x: u64| (0..3).map(|i| Fel::from_raw((x >> i) & 1)).collect::<Vec<_>>();
            let t = crate::tensor::Rank1Tensor::new(&f, vec![bits(u), bits(v)])?;
            if pit_witness(&t, &h)?.is_none() {
                return Ok(false);
            }
        }
    }
    Ok(pit_witness(&DenseTensor::zeros(&f, &[3, 3]), &h)?.is_none())
}

fn st_prony() -> crate::Result<bool> {
    let f = FieldCtx::prime(7)?;
    let n = 4;
    let pts = crate::sparse::default_points(&f, n)?;
    let v = crate::sparse::dual_rs(&f, &pts, 1)?;
    for idx in 0..7u64.pow(n as u32) {
        let x: Vec<Fel> = (0..n).map(|i| Fel::from_raw(idx / 7u64.pow(i as u32) % 7)).collect();
        if x.iter().filter(|c| !c.is_zero()).count() > 1 {
            continue;
        }
        if v.recover(&f, &[], &v.measure(&f, &x)?)? != x {
            return Ok(false);
        }
    }
    Ok(true)
}

fn st_lrr(seed: u64) -> crate::Result<bool> {
    let f = FieldCtx::prime(257)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..50 {
        let m = LowRankTensor::random(&f, &[8, 8], 2, &mut rng).expand();
        let d = DiagonalDecoder::new(&f, 8, 8, 2)?;
        let conv = BPrimeConverter::new(&f, 8, 8, 2)?;
        let ys = d.measure(&m)?;
        if d.recover(&ys)? != m || conv.convert(&conv.measure(&m)?)? != ys {
            return Ok(false);
        }
    }
    Ok(true)
}

fn st_tensor(seed: u64) -> crate::Result<bool> {
    let f = FieldCtx::prime((1 << 31) - 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plan = TensorPlan::new(&f, 3, 3, 2)?;
    for _ in 0..5 {
        let t = LowRankTensor::random(&f, &[3, 3, 3], 2, &mut rng).expand();
        if plan.recover(&plan.measure(&t)?)? != t {
            return Ok(false);
        }
    }
    Ok(true)
}

fn st_code() -> crate::Result<bool> {
    let f = FieldCtx::prime(7)?;
    let code = build_code(&f, &[3, 3], 1, Family::Dprime)?;
    Ok(matches!(
        crate::rankcode::min_distance_brute(&code, 1 << 16)?,
        crate::rankcode::MinDistance::Exact(d) if d >= 3
    ))
}
