//! One function per subcommand. Each returns metrics, asserted flags,
//! optional per-trial rows and an optional chart.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use prs_core::attacks::{
    default_purity_copies, output_impurity, purity_attack, run_distinguishing_experiment, AttackKind, Ensemble,
};
use prs_core::fixtures::{check_fixtures, write_fixtures};
use prs_core::generators::{AbortModel, Generator, GeneratorParams};
use prs_core::hybrids::hybrids_check;
use prs_core::prf::{BitString, PrfKey, PrfVariant};
use prs_core::protocols::{
    binding_search, extractor, hiding_tv, otp_decrypt, otp_encrypt, receiver_sample_pauli, reveal_verify,
    run_commitment_over_tcp, run_commitment_session, Opening, ProtocolParams, RevealOutcome, DOUBLE_OPENING_OVERLAP,
    MAX_EXTRACTOR_KEY_BITS,
};
use prs_core::quantum::{haar_sample, sym_dim, DensityMatrix, PauliString, DEFAULT_DIMENSION_CAP};
use prs_core::smallrange::{chi_square, expected_distinct, sr_statistics, SmallRangeTable};
use prs_core::tomography::{
    tomography_base, tomography_boosted, ChannelFirstInput, ChannelSecondInput, FirstScheme, Instantiation,
    SecondScheme, TomographyBudget, TomographyMode, VerifiableParams, DESK_DIVISOR,
};
use prs_core::SimRng;

use crate::config::{AttackChoice, CheckChoice, Experiment, ModeChoice, Preset, ResolvedConfig, VariantChoice};
use crate::error::{LabError, Result};
use crate::report::Flag;
use crate::svg::{Chart, ChartKind};

/// Environment variable naming the fixture directory.
pub const CACHE_ENV: &str = "PRS_LAB_CACHE";

/// Experiment result before it is wrapped into a report.
#[derive(Debug, Default)]
pub struct Outcome {
    pub metrics: BTreeMap<String, Value>,
    pub flags: Vec<Flag>,
    pub rows: Vec<BTreeMap<String, String>>,
    pub chart: Option<Chart>,
}

impl Outcome {
    fn metric(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.metrics.insert(key.into(), serde_json::to_value(value)?);
        Ok(())
    }
}

fn need<T: Copy>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| LabError::usage(format!("params.{field}"), "required"))
}

fn variant(cfg: &ResolvedConfig) -> PrfVariant {
    match cfg.params.variant {
        Some(VariantChoice::Mixer) => PrfVariant::Mixer {
            seed: cfg.params.mixer_seed.unwrap_or(0),
        },
        _ => PrfVariant::HmacSha256,
    }
}

fn mode(cfg: &ResolvedConfig) -> TomographyMode {
    match cfg.params.mode {
        Some(ModeChoice::Analytic) => TomographyMode::Analytic,
        _ => TomographyMode::Sampled,
    }
}

fn row(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn rate(count: usize, total: usize) -> f64 {
    count as f64 / total.max(1) as f64
}

pub fn dispatch(cfg: &ResolvedConfig) -> Result<Outcome> {
    match cfg.experiment {
        Experiment::HybridsCheck => hybrids(cfg),
        Experiment::AttackRun => attack(cfg),
        Experiment::TomographyBench => tomography_bench(cfg),
        Experiment::VerifyCorrectness => verify_correctness(cfg),
        Experiment::CommitDemo => commit_demo(cfg),
        Experiment::BindingSearch => binding(cfg),
        Experiment::OtpDemo => otp_demo(cfg),
        Experiment::SmallrangeStats => smallrange(cfg),
        Experiment::Fixtures => fixtures(cfg),
    }
}

fn hybrids(cfg: &ResolvedConfig) -> Result<Outcome> {
    let n_dim = need(cfg.params.n_dim, "n_dim")?;
    let t = need(cfg.params.t, "t")?;
    let generator = match cfg.params.lambda {
        Some(lambda) if n_dim.is_power_of_two() && n_dim > 1 => Some(Generator::new(
            GeneratorParams::new(lambda, 1, n_dim.trailing_zeros() as usize)?,
            variant(cfg),
        )),
        Some(_) => return Err(LabError::usage("params.n_dim", "keyed hybrid needs N a power of two ≥ 2")),
        None => None,
    };
    let report = hybrids_check(n_dim, t, generator.as_ref(), DEFAULT_DIMENSION_CAP)?;
    let mut out = Outcome::default();
    out.flags.push(Flag::at_most(
        "hybrid2_equals_hybrid3",
        report.hybrid2_hybrid3_max_abs_diff,
        1e-10,
        "random-sign average equals the parity-type mixture entrywise",
    ));
    let mut labels = Vec::new();
    let (mut tds, mut bounds) = (Vec::new(), Vec::new());
    for (key, pair) in &report.pairs {
        match (key.as_str(), pair.td, pair.bound) {
            ("2-3", Some(td), _) => out.flags.push(Flag::near("td_2_3", td, 0.0, 1e-10, "random-sign and parity-type hybrids coincide")),
            ("3-4", Some(td), Some(c)) => {
                out.flags.push(Flag::near("td_3_4_equals_collision", td, c, 1e-9, "distance to distinct types is the collision probability"));
                out.flags.push(Flag::at_most("td_3_4_envelope", td, report.envelope, "collision probability at most t²/N"));
            }
            ("3-4", None, Some(c)) => out.flags.push(Flag::near(
                "collision_certain",
                c,
                1.0,
                1e-12,
                "t > N: every tuple repeats an entry and all parity-type weight is on collisions",
            )),
            ("4-5", Some(td), Some(b)) => out.flags.push(Flag::at_most("td_4_5_envelope", td, b, "distinct types versus the symmetric subspace at most t²/N")),
            _ => {}
        }
        if let Some(td) = pair.td {
            labels.push(key.clone());
            tds.push(td);
            bounds.push(pair.bound.unwrap_or(f64::NAN));
        }
    }
    out.chart = Some(
        Chart::new(ChartKind::Bars, format!("Hybrid distances, N={n_dim}, t={t}"), labels)
            .series("trace distance", tds)
            .series("bound", bounds),
    );
    out.metric("hybrids", &report)?;
    Ok(out)
}

fn binom_f64(n: usize, k: usize) -> f64 {
    sym_dim(n - k + 1, k).to_string().parse().unwrap_or(f64::INFINITY)
}

fn attack(cfg: &ResolvedConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let lambda = need(p.lambda, "lambda")?;
    let n = need(p.n, "n")?;
    let g = Generator::new(GeneratorParams::new(lambda, need(p.d, "d")?, n)?, variant(cfg));
    let mut out = Outcome::default();
    match need(p.attack, "attack")? {
        AttackChoice::Gram => {
            let t = need(p.t, "t")?;
            let r = run_distinguishing_experiment(&g, &AbortModel::NEVER, AttackKind::Gram { t }, Ensemble::Generator, cfg.trials, cfg.seed)?;
            let haar_bound = (1u64 << lambda) as f64 / binom_f64((1 << n) + t - 1, t);
            out.flags.push(Flag::near("accept_generator", r.accept_gen, 1.0, 1e-6, "generator outputs lie in the enrolled span"));
            out.flags.push(Flag::at_most(
                "accept_haar",
                r.accept_haar,
                haar_bound + 3.0 * r.haar_std_err,
                "Haar acceptance at most 2^λ / dim Sym^t plus three standard errors",
            ));
            out.flags.push(Flag::at_least("advantage", r.advantage, 1.0 / 3.0, "distinguishing advantage at least 1/3"));
            out.metric("haar_bound", haar_bound)?;
            out.chart = Some(
                Chart::new(ChartKind::Bars, format!("Span test, λ={lambda}, n={n}, t={t}"), vec!["generator".into(), "Haar".into()])
                    .series("acceptance", vec![r.accept_gen, r.accept_haar])
                    .guide("Haar bound", haar_bound),
            );
            out.rows.push(row(&[
                ("accept_gen", r.accept_gen.to_string()),
                ("accept_haar", r.accept_haar.to_string()),
                ("advantage", r.advantage.to_string()),
                ("ci95", r.ci95.to_string()),
            ]));
            out.metric("attack", &r)?;
        }
        AttackChoice::Purity => {
            let model = AbortModel::Constant { eta: need(p.eta, "eta")? };
            let kappa = output_impurity(&g, &model, &PrfKey::from_index(lambda, 0), &BitString::zeros(g.params.d))?;
            let copies = match p.copies {
                Some(c) => c,
                None => default_purity_copies(kappa)?,
            };
            let r = purity_attack(&g, &model, copies, cfg.trials, cfg.seed)?;
            out.flags.push(Flag::at_least("reject_generator", r.reject_gen_sampled, 1.0 / 3.0, "mixed outputs fail some SWAP test with probability at least 1/3"));
            out.flags.push(Flag::near("reject_haar", r.reject_haar_analytic, 0.0, 0.0, "pure inputs pass every SWAP test"));
            out.metric("copies", copies)?;
            out.chart = Some(
                Chart::new(ChartKind::Bars, format!("SWAP-test rejection, η={}", need(p.eta, "eta")?), vec!["generator".into(), "Haar".into()])
                    .series("sampled", vec![r.reject_gen_sampled, r.reject_haar_sampled])
                    .series("analytic", vec![r.reject_gen_analytic, r.reject_haar_analytic])
                    .guide("1/3", 1.0 / 3.0),
            );
            out.rows.push(row(&[
                ("copies", copies.to_string()),
                ("kappa_mean", r.kappa_mean.to_string()),
                ("reject_gen_sampled", r.reject_gen_sampled.to_string()),
                ("reject_gen_analytic", r.reject_gen_analytic.to_string()),
            ]));
            out.metric("attack", &r)?;
        }
    }
    Ok(out)
}

fn random_state(n: usize, rng: &mut SimRng) -> Result<DensityMatrix> {
    let a = DensityMatrix::from_pure(&haar_sample(n, rng)?);
    let b = DensityMatrix::from_pure(&haar_sample(n, rng)?);
    let w: f64 = rng.random();
    Ok(DensityMatrix::mixture(&[(w, &a), (1.0 - w, &b)])?)
}

fn tomography_bench(cfg: &ResolvedConfig) -> Result<Outcome> {
    let n = need(cfg.params.n, "n")?;
    let s = need(cfg.params.s, "s")?;
    let reps = need(cfg.params.reps, "reps")?;
    let n_dim = 1usize << n;
    let boosted_s = (s / 2).max(1);
    let budget = TomographyBudget::new(n_dim, boosted_s, reps)?;
    let root = SimRng::from_seed(cfg.seed);
    let mut out = Outcome::default();
    let (mut base_sum, mut within, mut aborts) = (0.0, 0, 0);
    let mut base_errors = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = root.fork(trial as u64);
        let rho = random_state(n, &mut rng)?;
        let base = tomography_base(&rho, s, &mut rng)?.error_sq(&rho)?;
        let boosted = tomography_boosted(&rho, &budget, &mut rng)?;
        let berr = boosted.error_sq(&rho)?;
        base_sum += base;
        base_errors.push(base);
        within += (berr <= budget.guarantee() && !boosted.aborted) as usize;
        aborts += boosted.aborted as usize;
        out.rows.push(row(&[
            ("trial", trial.to_string()),
            ("base_error_sq", base.to_string()),
            ("boosted_error_sq", berr.to_string()),
            ("boosted_aborted", boosted.aborted.to_string()),
        ]));
    }
    let mean = base_sum / cfg.trials.max(1) as f64;
    let eps = n_dim as f64 / s as f64;
    out.flags.push(Flag::at_most("base_mean_error", mean, 1.5 * eps, "mean squared Frobenius error at most 1.5·N/s"));
    out.flags.push(Flag::at_least("boosted_within_guarantee", rate(within, cfg.trials), 0.99, "boosted error at most 9N/s in 99% of runs"));
    out.flags.push(Flag::at_most("boosted_aborts", aborts as f64, 0.0, "majority cluster always found"));
    out.metric("base_s", s)?;
    out.metric("boosted_budget", budget)?;
    out.metric("base_mean_error_sq", mean)?;
    out.chart = Some(histogram("Base tomography error", &base_errors, 10).guide("N/s", eps).guide("1.5·N/s", 1.5 * eps));
    Ok(out)
}

/// Counts of `values` in equal-width bins, as a bar chart over bin midpoints.
fn histogram(title: &str, values: &[f64], bins: usize) -> Chart {
    let max = values.iter().copied().fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let mut counts = vec![0.0; bins];
    for v in values {
        counts[((v / max * bins as f64) as usize).min(bins - 1)] += 1.0;
    }
    let labels = (0..bins).map(|i| format!("{:.1e}", max * (i as f64 + 0.5) / bins as f64)).collect();
    Chart::new(ChartKind::Bars, title, labels).series("count", counts)
}

fn verifiable_params(cfg: &ResolvedConfig, inst: Instantiation, n: usize, lambda: usize) -> Result<VerifiableParams> {
    let v = match cfg.preset {
        Preset::Paper => VerifiableParams::paper(inst, n, lambda)?,
        Preset::Desk => VerifiableParams::desk(inst, n, lambda, DESK_DIVISOR)?,
    };
    Ok(v.with_mode(mode(cfg)))
}

fn verify_correctness(cfg: &ResolvedConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let (lambda, n) = (need(p.lambda, "lambda")?, need(p.n, "n")?);
    let check = need(p.check, "check")?;
    let inst = if need(p.instantiation, "instantiation")? == 1 { Instantiation::First } else { Instantiation::Second };
    let params = verifiable_params(cfg, inst, n, lambda)?;
    let root = SimRng::from_seed(cfg.seed);
    let mut out = Outcome::default();
    let mut hits = 0;
    for trial in 0..cfg.trials {
        let mut rng = root.fork(trial as u64);
        let key = PrfKey::random(lambda, &mut rng);
        let b: bool = rng.random();
        let claimed = match check {
            CheckChoice::SameInput => b,
            CheckChoice::DifferentInput => !b,
        };
        let valid = match inst {
            Instantiation::First => {
                let g = Generator::new(GeneratorParams::new(lambda, 1, n)?, variant(cfg));
                let scheme = FirstScheme::new(g, AbortModel::NEVER, params)?;
                let input = |b| ChannelFirstInput {
                    pauli: PauliString::sample(n, &mut SimRng::from_seed(trial as u64)),
                    key: key.clone(),
                    x: BitString::from_u64(trial as u64 & 1, 1),
                    b,
                };
                let m = scheme.tomography(&input(b), &mut rng)?;
                scheme.verify(&input(claimed), &m, &mut rng)?.is_valid()
            }
            Instantiation::Second => {
                let g = Generator::new(GeneratorParams::new(lambda, 2, n)?, variant(cfg));
                let scheme = SecondScheme::new(g, AbortModel::NEVER, params)?;
                let i = BitString::random(1, &mut rng);
                let input = |b| ChannelSecondInput { key: key.clone(), i: i.clone(), b };
                let m = scheme.tomography(&input(b), &mut rng)?;
                scheme.verify(&input(claimed), &m, &mut rng)?.is_valid()
            }
        };
        let expected = check == CheckChoice::SameInput;
        hits += (valid == expected) as usize;
        out.rows.push(row(&[("trial", trial.to_string()), ("key", key.to_hex()), ("b", (b as u8).to_string()), ("valid", valid.to_string())]));
    }
    let r = rate(hits, cfg.trials);
    match check {
        CheckChoice::SameInput => out.flags.push(Flag::at_least("same_input_valid_rate", r, 0.99, "honest tomograph verifies against its own input")),
        CheckChoice::DifferentInput => match inst {
            // Paulis that nearly fix the phase state let the flipped bit through.
            Instantiation::First => {
                let fail = 0.5f64.powi(n as i32);
                let se = (fail * (1.0 - fail) / cfg.trials.max(1) as f64).sqrt();
                out.flags.push(Flag::at_least(
                    "different_input_invalid_rate",
                    r,
                    1.0 - fail - 3.0 * se,
                    "flipped-bit acceptance at most 2^-n plus three standard errors",
                ))
            }
            Instantiation::Second => out.flags.push(Flag::at_least(
                "different_input_invalid_rate",
                r,
                0.95,
                "tomograph fails against the flipped bit for all but a vanishing fraction of keys",
            )),
        },
    }
    out.metric("verifiable", params)?;
    out.metric("rate", r)?;
    Ok(out)
}

/// Paper-scale copy counts overflow JSON integers, so they go out as strings.
fn budget_only(out: &mut Outcome, params: &ProtocolParams, expected_copies: u128) -> Result<()> {
    let b = &params.verifiable.budget;
    out.metric(
        "protocol",
        json!({
            "kind": format!("{:?}", params.kind),
            "lambda": params.lambda,
            "d": params.d,
            "n": params.n,
            "m": params.m,
            "s": b.s,
            "guarantee": b.guarantee(),
            "accept_threshold": params.verifiable.accept_threshold,
        }),
    )?;
    out.metric("copies_per_tomograph", params.copies().to_string())?;
    out.flags.push(Flag::near(
        "copy_identity",
        (params.copies() == expected_copies) as u8 as f64,
        1.0,
        0.0,
        "L = 4·s·N²·λ matches the stated copy count",
    ));
    Ok(())
}

fn commit_demo(cfg: &ResolvedConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let lambda = need(p.lambda, "lambda")?;
    let mut out = Outcome::default();
    if cfg.preset == Preset::Paper {
        let params = ProtocolParams::commitment_paper(lambda, variant(cfg))?;
        budget_only(&mut out, &params, 6561u128 * (1u128 << (3 * params.n + 5)) * lambda as u128)?;
        out.flags.push(Flag::at_least("m_at_least_3_lambda", params.m as f64, 3.0 * lambda as f64, "binding needs m ≥ 3λ"));
        out.metric("binding_envelope", params.binding_envelope())?;
        return Ok(out);
    }
    let params = ProtocolParams::commitment_desk(lambda, need(p.d, "d")?, need(p.n, "n")?, mode(cfg), variant(cfg))?;
    let root = SimRng::from_seed(cfg.seed);
    let (mut revealed, mut accepting, mut agree, mut flipped_bottom) = (0, 0, 0, 0);
    let extract = lambda <= MAX_EXTRACTOR_KEY_BITS;
    for run in 0..cfg.trials {
        let b = run % 2 == 1;
        let seed = root.fork(run as u64).next_seed();
        let session = if p.tcp == Some(true) {
            run_commitment_over_tcp(params, b, seed)?
        } else {
            run_commitment_session(params, b, seed)?
        };
        revealed += (session.outcome == RevealOutcome::Bit(b)) as usize;
        let mut extracted = String::from("skipped");
        if session.outcome != RevealOutcome::Bottom {
            accepting += 1;
            if extract {
                let e = extractor(&session.transcript)?;
                agree += (e == session.outcome) as usize;
                extracted = format!("{e:?}");
            }
        }
        // Same key, other bit: must not open.
        let probe = Opening { key: session.opening.key.clone(), b: !b as u8 };
        flipped_bottom += (reveal_verify(&session.transcript, &probe) == RevealOutcome::Bottom) as usize;
        out.rows.push(row(&[
            ("run", run.to_string()),
            ("b", (b as u8).to_string()),
            ("outcome", format!("{:?}", session.outcome)),
            ("extracted", extracted),
            ("digest", session.transcript_digest.clone()),
            ("bytes", session.bytes_exchanged.to_string()),
        ]));
    }
    out.flags.push(Flag::at_least("honest_reveal_rate", rate(revealed, cfg.trials), 1.0, "honest commit then reveal returns b"));
    if extract {
        out.flags.push(Flag::at_least("extractor_agreement", rate(agree, accepting), 1.0, "extractor output equals every accepted reveal"));
    }
    out.metric("protocol", params)?;
    out.metric("binding_relaxed", params.binding_relaxed)?;
    out.metric("wrong_bit_rejected_rate", rate(flipped_bottom, cfg.trials))?;
    if lambda <= 10 {
        let pauli = receiver_sample_pauli(&params, &mut root.fork(u64::MAX));
        out.metric("hiding_tv_descriptive", hiding_tv(&params, &pauli)?)?;
    }
    Ok(out)
}

fn binding(cfg: &ResolvedConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let params = ProtocolParams::commitment_desk(need(p.lambda, "lambda")?, need(p.d, "d")?, need(p.n, "n")?, TomographyMode::Analytic, variant(cfg))?;
    let report = binding_search(&params, cfg.trials, cfg.seed)?;
    let mut out = Outcome::default();
    let worst = report
        .trials
        .iter()
        .map(|t| t.double_openings as f64 - t.overlap_pairs as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    out.flags.push(Flag::at_most("double_opening_implies_overlap", worst.max(0.0), 0.0, "every double opening has block overlaps at least 542/729"));
    for (i, t) in report.trials.iter().enumerate() {
        out.rows.push(row(&[
            ("challenge", i.to_string()),
            ("overlap_pairs", t.overlap_pairs.to_string()),
            ("double_openings", t.double_openings.to_string()),
            ("max_min_overlap", t.max_min_overlap.to_string()),
        ]));
    }
    out.chart = Some(
        Chart::new(ChartKind::Bars, format!("Best key-pair overlap, λ={}, m={}", report.lambda, report.m), (0..report.trials.len()).map(|i| i.to_string()).collect())
            .series("max over pairs of min_x overlap", report.trials.iter().map(|t| t.max_min_overlap).collect())
            .guide("542/729", DOUBLE_OPENING_OVERLAP),
    );
    out.metric("binding", &report)?;
    Ok(out)
}

fn otp_demo(cfg: &ResolvedConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let lambda = need(p.lambda, "lambda")?;
    let mut out = Outcome::default();
    if cfg.preset == Preset::Paper {
        let params = ProtocolParams::otp_paper(lambda, variant(cfg))?;
        return budget_only(&mut out, &params, (1u128 << (3 * params.n + 11)) * lambda as u128).map(|_| out);
    }
    let params = ProtocolParams::otp_desk(lambda, need(p.d, "d")?, need(p.n, "n")?, mode(cfg), variant(cfg))?;
    let bits = need(p.message_bits, "message_bits")?;
    let root = SimRng::from_seed(cfg.seed);
    let (mut correct, mut wrong_key_distance) = (0, 0);
    for trial in 0..cfg.trials {
        let mut rng = root.fork(trial as u64);
        let key = PrfKey::random(lambda, &mut rng);
        let msg = BitString::random(bits, &mut rng);
        let ct = otp_encrypt(&key, &msg, &params, &mut rng)?;
        let dec = otp_decrypt(&key, &ct, &mut rng)?;
        let errors = dec.hamming_distance(&msg)?;
        correct += bits - errors;
        let other = PrfKey::random(lambda, &mut rng);
        wrong_key_distance += otp_decrypt(&other, &ct, &mut rng)?.hamming_distance(&msg)?;
        out.rows.push(row(&[("trial", trial.to_string()), ("message", msg.to_string()), ("decrypted", dec.to_string()), ("bit_errors", errors.to_string())]));
    }
    let accuracy = rate(correct, bits * cfg.trials);
    match params.verifiable.mode {
        TomographyMode::Analytic => out.flags.push(Flag::near("bit_accuracy", accuracy, 1.0, 0.0, "exact tomographs always decrypt")),
        TomographyMode::Sampled => out.flags.push(Flag::at_least("bit_accuracy", accuracy, 0.99, "sampled tomographs decrypt at least 99% of bits")),
    }
    out.metric("protocol", params)?;
    out.metric("wrong_key_bit_disagreement", rate(wrong_key_distance, bits * cfg.trials))?;
    Ok(out)
}

fn smallrange(cfg: &ResolvedConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let (r, domain, base) = (need(p.r, "r")?, need(p.domain, "domain")?, need(p.base, "base")?);
    if domain < 2 || base < 2 {
        return Err(LabError::usage("params.domain", "domain and base need at least two elements"));
    }
    let weights: Vec<f64> = (1..=base).map(|w| w as f64).collect();
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let dist = rand::distr::weighted::WeightedIndex::new(&weights).map_err(|e| LabError::usage("params.base", e.to_string()))?;
    let mut rng = SimRng::from_seed(cfg.seed);
    let mut counts = vec![0u64; base];
    let (mut collisions, mut distinct_sum, mut max_bucket) = (0usize, 0.0, 0usize);
    for _ in 0..cfg.trials {
        let table = SmallRangeTable::sample(r, domain, |g: &mut SimRng| rand::distr::Distribution::sample(&dist, g), &mut rng)?;
        counts[*table.eval(0)?] += 1;
        collisions += (table.index_of(0)? == table.index_of(1)?) as usize;
        let s = sr_statistics(&table);
        distinct_sum += s.distinct_indices as f64;
        max_bucket = max_bucket.max(s.max_bucket);
    }
    let fit = chi_square(&counts, &probs)?;
    let q = 1.0 / r as f64;
    let sigma = (q * (1.0 - q) / cfg.trials.max(1) as f64).sqrt();
    let mut out = Outcome::default();
    out.flags.push(Flag::at_least("marginal_chi_square_p", fit.p_value, 0.01, "single-point marginal equals the base distribution"));
    out.flags.push(Flag::near("index_collision_rate", rate(collisions, cfg.trials), q, 3.0 * sigma, "two points share an index with probability 1/r"));
    out.metric("chi_square", fit)?;
    out.metric("mean_distinct_indices", distinct_sum / cfg.trials.max(1) as f64)?;
    out.metric("expected_distinct_indices", expected_distinct(r, domain))?;
    out.metric("max_bucket", max_bucket)?;
    for (i, (&c, &pr)) in counts.iter().zip(&probs).enumerate() {
        out.rows.push(row(&[("value", i.to_string()), ("observed", c.to_string()), ("expected", (pr * cfg.trials as f64).to_string())]));
    }
    out.chart = Some(
        Chart::new(ChartKind::Bars, format!("Marginal at one point, r={r}"), (0..base).map(|i| i.to_string()).collect())
            .series("observed", counts.iter().map(|&c| c as f64).collect())
            .series("expected", probs.iter().map(|pr| pr * cfg.trials as f64).collect()),
    );
    Ok(out)
}

/// Fixture directory: `PRS_LAB_CACHE`, else `<out>/fixtures`, else `./fixtures`.
pub fn fixture_dir(cfg: &ResolvedConfig) -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .or_else(|| cfg.output.dir.as_ref().map(|d| d.join("fixtures")))
        .unwrap_or_else(|| PathBuf::from("fixtures"))
}

fn fixtures(cfg: &ResolvedConfig) -> Result<Outcome> {
    let dir = fixture_dir(cfg);
    let mut out = Outcome::default();
    if cfg.params.check_only != Some(true) {
        out.metric("written", write_fixtures(&dir)?)?;
    }
    for (name, ok) in check_fixtures(&dir)? {
        out.flags.push(Flag::near(&format!("fixture:{name}"), ok as u8 as f64, 1.0, 0.0, "file matches a fresh build"));
    }
    out.metric("directory", dir.display().to_string())?;
    out.metrics.insert("fixture_seed".into(), json!(prs_core::fixtures::FIXTURE_SEED));
    Ok(out)
}
