//! Acceptance criteria. Runs with its own harness and prints one line per
//! criterion; exits nonzero if any fails.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use offload_core::engine::{
    DecisionEngine, DecisionRequest, DelayTolerance, EnvironmentSnapshot, Reason, TaskDescriptor,
    Verdict,
};
use offload_core::history::{HistoryLog, HistoryRecord};
use offload_core::model::{self, PowerProfile, TransferSpec};
use offload_core::predictors::{
    predict_execution_time, smoothing_coefficient, EmaState, TimeQuery,
};
use offload_core::runtime::client::RemoteClient;
use offload_core::runtime::local::LocalExecutor;
use offload_core::runtime::protocol::{self, Frame, FrameKind, DEFAULT_MAX_PAYLOAD};
use offload_core::runtime::server::{Server, ServerConfig};
use offload_core::runtime::workloads::{self, pathfinder, AppId};
use offload_core::runtime::{TaskSpec, WorkloadRegistry};
use offload_core::simulator::{self, Factor, Mode, ResultSizeModel, SweepConfig, SweepRow};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.abs().max(f64::MIN_POSITIVE)
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> SweepConfig {
    SweepConfig::load(configs_dir().join(format!("{name}.conf")))
        .unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn random_profile(rng: &mut StdRng) -> PowerProfile {
    let p_exec = rng.gen_range(0.1..5.0);
    PowerProfile::new(
        p_exec,
        rng.gen_range(0.01..=p_exec),
        rng.gen_range(0.1..5.0),
        rng.gen_range(0.1..5.0),
    )
    .unwrap()
}

// 1
fn equation_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for i in 0..10_000 {
        let p = random_profile(&mut rng);
        let t_exec = rng.gen_range(0.0..100.0);
        let n = rng.gen_range(1.0..50.0);
        let d_send = rng.gen_range(0.0..1e8);
        let d_recv = rng.gen_range(0.0..1e8);
        let b_send = rng.gen_range(1e3..1e8);
        let b_recv = rng.gen_range(1e3..1e8);
        let tr = TransferSpec::new(d_send, d_recv, b_send, b_recv).unwrap();
        let l = model::energy_ledger(&p, t_exec, n, &tr).map_err(|e| e.to_string())?;

        // Independent evaluation of the break-even form.
        let t_idle = t_exec / n;
        let e0 = p.p_exec * t_exec - p.p_idle * t_idle;
        let e_prime = p.p_send * d_send / b_send + p.p_receive * d_recv / b_recv;
        let scale = l.e_local.max(l.e_cloud);
        let err = (l.e_tradeoff - (e0 - e_prime)).abs() / scale.max(f64::MIN_POSITIVE);
        worst = worst.max(err);
        check(rel_close(l.e_tradeoff, e0 - e_prime, scale, 1e-9), || {
            format!("sample {i}: tradeoff {} vs {}", l.e_tradeoff, e0 - e_prime)
        })?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "10000 samples, worst relative error {worst:.2e}, {elapsed:.2?}"
    ))
}

// 2
fn ema_closed_form() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    for n in 1..=100u32 {
        let alpha = 2.0 / (n as f64 + 1.0);
        check(smoothing_coefficient(n) == alpha, || format!("alpha({n})"))?;
        check(EmaState::new(n).unwrap().alpha() == alpha, || {
            format!("state alpha({n})")
        })?;
    }
    for s in 0..1000 {
        let n = rng.gen_range(1..=100u32);
        let len = rng.gen_range(1..=200usize);
        let xs: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1e6)).collect();
        let mut ema = EmaState::new(n).unwrap();
        for &x in &xs {
            ema.observe(x).unwrap();
        }
        let a = 2.0 / (n as f64 + 1.0);
        let t = xs.len();
        // C_t = (1-a)^(t-1)·c_1 + Σ_{k=2..t} a·(1-a)^(t-k)·c_k
        let mut direct = (1.0 - a).powi(t as i32 - 1) * xs[0];
        for (k, &x) in xs.iter().enumerate().skip(1) {
            direct += a * (1.0 - a).powi((t - 1 - k) as i32) * x;
        }
        let got = ema.current().unwrap();
        check(rel_close(got, direct, direct, 1e-12), || {
            format!("stream {s} (N={n}, len={len}): {got} vs {direct}")
        })?;
    }
    Ok("alpha exact for N=1..100; 1000 streams agree to 1e-12".into())
}

// 3
fn predictor_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    for l in 0..500 {
        let count = rng.gen_range(2..=200);
        let coarse = rng.gen_bool(0.3);
        let log: Vec<HistoryRecord> = (0..count)
            .map(|_| {
                let app = if rng.gen_bool(0.8) {
                    "sort"
                } else {
                    "wordcount"
                };
                let (s, c) = if coarse {
                    (
                        rng.gen_range(0..8u64) * 1000,
                        rng.gen_range(0..4) as f64 * 25.0,
                    )
                } else {
                    (rng.gen_range(0..1_000_000), rng.gen_range(0.0..=100.0))
                };
                HistoryRecord::new(app, s, c, rng.gen_range(0.001..100.0)).unwrap()
            })
            .collect();
        let q = TimeQuery {
            application: "sort".into(),
            input_size: if coarse {
                rng.gen_range(0..8u64) * 1000
            } else {
                rng.gen_range(0..1_200_000)
            },
            avg_cpu_workload: if coarse {
                rng.gen_range(0..4) as f64 * 25.0
            } else {
                rng.gen_range(0.0..=100.0)
            },
        };
        let got = predict_execution_time(&log, &q).ok();
        check(got == exhaustive_nearest2(&log, &q), || {
            format!("log {l}: {got:?}")
        })?;
    }
    Ok("500 random logs match the exhaustive scan exactly".into())
}

fn exhaustive_nearest2(log: &[HistoryRecord], q: &TimeQuery) -> Option<f64> {
    let recs: Vec<&HistoryRecord> = log
        .iter()
        .filter(|r| r.application == q.application)
        .collect();
    if recs.len() < 2 {
        return None;
    }
    let sizes: Vec<f64> = recs.iter().map(|r| r.input_size as f64).collect();
    let cpus: Vec<f64> = recs.iter().map(|r| r.avg_cpu_workload).collect();
    let span = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let (ss, cs) = (span(&sizes), span(&cpus));
    let norm = |d: f64, s: f64| if s > 0.0 { d / s } else { 0.0 };
    let mut scored: Vec<(f64, usize)> = (0..recs.len())
        .map(|i| {
            let a = norm(sizes[i] - q.input_size as f64, ss);
            let b = norm(cpus[i] - q.avg_cpu_workload, cs);
            (a * a + b * b, i)
        })
        .collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    Some((recs[scored[0].1].execution_time + recs[scored[1].1].execution_time) / 2.0)
}

// 4
fn decision_golden() -> Outcome {
    let engine = DecisionEngine::default();
    let req = |input, result, delay, p: PowerProfile, n| DecisionRequest {
        task: TaskDescriptor {
            application: "wordcount".into(),
            input_size: input,
            result_size: result,
        },
        delay_tolerance: delay,
        power_profile: p,
        speedup_n: n,
    };
    let env = |b| EnvironmentSnapshot {
        cpu_workload: 50.0,
        send_bandwidth: b,
        receive_bandwidth: b,
    };
    let p = PowerProfile::new(0.9, 0.3, 1.0, 1.0).unwrap();

    // Step 2: an energy-losing transfer still offloads when the delay is violated.
    let d = engine
        .decide_with_prediction(
            &req(10_000_000, 10_000_000, DelayTolerance::Finite(5.0), p, 2.0),
            &env(1000.0),
            10.0,
        )
        .map_err(|e| e.to_string())?;
    check(
        (d.verdict, d.reason) == (Verdict::Offload, Reason::DelayOverride),
        || format!("delay: {d}"),
    )?;

    // E0' = 0.9·10 − 0.3·1 = 8.7 J, E' = 2.0 + 0.5 = 2.5 J, via the history path.
    let log = vec![
        HistoryRecord::new("wordcount", 2_000_000, 50.0, 10.0).unwrap(),
        HistoryRecord::new("wordcount", 2_000_000, 50.0, 10.0).unwrap(),
    ];
    let d = engine
        .decide(
            &req(2_000_000, 500_000, DelayTolerance::Infinite, p, 10.0),
            &env(1_000_000.0),
            &log,
        )
        .map_err(|e| e.to_string())?;
    let l = d.ledger.ok_or("missing ledger")?;
    check(
        (d.verdict, d.reason) == (Verdict::Offload, Reason::EnergyComparison),
        || format!("energy: {d}"),
    )?;
    check(
        rel_close(l.e0_prime, 8.7, 8.7, 1e-12) && rel_close(l.e_prime, 2.5, 2.5, 1e-12),
        || format!("E0'={} E'={}", l.e0_prime, l.e_prime),
    )?;

    let d = engine
        .decide_with_prediction(
            &req(1000, 24, DelayTolerance::Infinite, p, 10.0),
            &env(1000.0),
            0.0,
        )
        .map_err(|e| e.to_string())?;
    check(
        (d.verdict, d.reason) == (Verdict::Local, Reason::EnergyComparison),
        || format!("zero compute: {d}"),
    )?;
    Ok("delay override, 8.7 J vs 2.5 J offload, zero-compute local".into())
}

fn offloading_verdicts(rows: &[SweepRow]) -> Vec<(f64, Verdict)> {
    rows.iter()
        .filter(|r| r.mode == Mode::Offloading)
        .map(|r| {
            (
                r.factor_value,
                r.verdict.expect("offloading rows carry a verdict"),
            )
        })
        .collect()
}

/// Value of the single Local→Offload or Offload→Local transition, reported
/// as the first grid point past it.
fn single_flip(v: &[(f64, Verdict)], before: Verdict) -> Result<f64, String> {
    let flips: Vec<usize> = (1..v.len()).filter(|&i| v[i].1 != v[i - 1].1).collect();
    match flips.as_slice() {
        [i] if v[0].1 == before => Ok(v[*i].0),
        _ => Err(format!("expected one flip from {before}, got {v:?}")),
    }
}

fn timed_sweep(name: &str) -> Result<(Vec<SweepRow>, f64, Duration), String> {
    let cfg = load(name);
    let start = Instant::now();
    let rows = simulator::run_sweep(&cfg).map_err(|e| format!("{name}: {e}"))?;
    let took = start.elapsed();
    if took > Duration::from_secs(1) {
        return Err(format!("{name} took {took:?}"));
    }
    let step = (cfg.hi - cfg.lo) / (cfg.steps - 1) as f64;
    Ok((rows, step, took))
}

// 5
fn breakeven_reproduction() -> Outcome {
    let mut notes = Vec::new();
    let targets = [
        ("wordcount_input_size", 256_000.0, Verdict::Local),
        ("wordcount_bandwidth", 600_000.0, Verdict::Local),
        ("wordcount_cpu_workload", 25.0, Verdict::Local),
        ("facefinder_bandwidth", 50_000.0, Verdict::Local),
    ];
    for (name, target, before) in targets {
        let (rows, step, _) = timed_sweep(name)?;
        let flip =
            single_flip(&offloading_verdicts(&rows), before).map_err(|e| format!("{name}: {e}"))?;
        check((flip - target).abs() <= step * (1.0 + 1e-12), || {
            format!("{name}: flip at {flip}, target {target} ± {step}")
        })?;
        let exact = simulator::find_breakeven(&load(name)).map_err(|e| format!("{name}: {e}"))?;
        notes.push(format!("{name} flips at {flip} (break-even {exact:.0})"));
    }
    for name in ["sort_input_size", "sort_bandwidth", "sort_cpu_workload"] {
        let (rows, _, _) = timed_sweep(name)?;
        let v = offloading_verdicts(&rows);
        check(v.iter().all(|(_, d)| *d == Verdict::Local), || {
            format!("{name} offloads: {v:?}")
        })?;
    }
    for name in [
        "pathfinder_input_size",
        "pathfinder_bandwidth",
        "pathfinder_cpu_workload",
        "pathfinder_delay_tolerance",
    ] {
        let (rows, _, _) = timed_sweep(name)?;
        for (x, d) in offloading_verdicts(&rows) {
            // A zero-byte input has no compute to save.
            let expect = if name == "pathfinder_input_size" && x == 0.0 {
                Verdict::Local
            } else {
                Verdict::Offload
            };
            check(d == expect, || format!("{name} at {x}: {d}"))?;
        }
    }
    notes.push("sort never offloads; pathfinder offloads at every nonzero input".into());
    Ok(notes.join("; "))
}

// 6
fn delay_threshold_shape() -> Outcome {
    let cfg = load("sort_delay_tolerance");
    check(
        cfg.cost
            .t_exec(cfg.defaults.input_size as f64, cfg.defaults.cpu_workload)
            == 0.080,
        || "calibrated sort time is not 80 ms".into(),
    )?;
    let rows = simulator::run_sweep(&cfg).map_err(|e| e.to_string())?;
    for c in rows.chunks(3) {
        let (local, cloud, off) = (&c[0], &c[1], &c[2]);
        let tracked = if off.factor_value < 80.0 {
            cloud
        } else {
            local
        };
        check(
            off.energy == tracked.energy + cfg.overhead_energy
                && off.time == tracked.time + cfg.overhead_time,
            || {
                format!(
                    "at {} ms offloading row does not track {}",
                    off.factor_value, tracked.mode
                )
            },
        )?;
    }
    Ok("offloading tracks cloud below 80 ms and local from 80 ms".into())
}

// 7
fn breakeven_closed_form() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let base = load("sort_bandwidth");
    let mut worst = 0.0f64;
    for i in 0..100 {
        let mut cfg = base.clone();
        cfg.profile = random_profile(&mut rng);
        cfg.speedup_n = rng.gen_range(1.5..20.0);
        let s = rng.gen_range(1_000..10_000_000u64);
        let t = rng.gen_range(0.01..100.0);
        cfg.defaults.input_size = s;
        cfg.defaults.cpu_workload = rng.gen_range(0.0..90.0);
        cfg.cost.anchor_size = s as f64;
        cfg.cost.anchor_cpu = cfg.defaults.cpu_workload;
        cfg.cost.anchor_time = t;
        cfg.cost.result_size = ResultSizeModel::Constant(0);
        let p = cfg.profile;
        let e0 = p.p_exec * t - p.p_idle * t / cfg.speedup_n;
        let b_star = p.p_send * s as f64 / e0;
        cfg.factor = Factor::Bandwidth;
        cfg.lo = b_star * rng.gen_range(0.01..0.9);
        cfg.hi = b_star * rng.gen_range(1.1..100.0);
        let b = simulator::find_breakeven(&cfg).map_err(|e| format!("case {i}: {e}"))?;
        let err = (b - b_star).abs() / b_star;
        worst = worst.max(err);
        check(err <= 1e-6, || format!("case {i}: {b} vs {b_star}"))?;
    }
    Ok(format!("100 cases, worst relative error {worst:.2e}"))
}

fn dijkstra(g: &pathfinder::Graph) -> Vec<Option<i64>> {
    let mut adj = vec![Vec::new(); g.nodes];
    for e in &g.edges {
        adj[e.from].push((e.to, e.weight));
    }
    let mut dist = vec![None; g.nodes];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0i64, g.source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some() {
            continue;
        }
        dist[u] = Some(d);
        for &(v, w) in &adj[u] {
            if dist[v].is_none() {
                heap.push(Reverse((d + w, v)));
            }
        }
    }
    dist
}

fn negative_cycle_graph(rng: &mut StdRng) -> Vec<u8> {
    let n = rng.gen_range(4..=50usize);
    let mut edges: Vec<(usize, usize, i64)> = (0..n * 2)
        .map(|_| {
            (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..100),
            )
        })
        .collect();
    // Chain 0 -> 1 -> 2 -> 3 with a cycle 1 -> 2 -> 3 -> 1 of negative total.
    let a = rng.gen_range(1..20);
    let b = rng.gen_range(1..20);
    edges.push((0, 1, rng.gen_range(0..10)));
    edges.push((1, 2, a));
    edges.push((2, 3, b));
    edges.push((3, 1, -(a + b) - rng.gen_range(1..10)));
    let mut text = format!("{n} {} 0\n", edges.len());
    for (u, v, w) in edges {
        text.push_str(&format!("{u} {v} {w}\n"));
    }
    text.into_bytes()
}

// 8
fn runtime_equivalence() -> Outcome {
    let start = Instant::now();
    let server = Server::bind(
        "127.0.0.1:0",
        WorkloadRegistry::standard(),
        ServerConfig::default(),
    )
    .map_err(|e| e.to_string())?
    .spawn()
    .map_err(|e| e.to_string())?;
    let client = RemoteClient::new(server.addr().to_string());
    let local = LocalExecutor::default();
    let mut log = HistoryLog::in_memory();
    let mut rng = StdRng::seed_from_u64(8);
    let mut count = 0;
    for app in AppId::ALL {
        for i in 0..100 {
            let size = match app {
                AppId::Pathfinder => rng.gen_range(0..8_000),
                _ => rng.gen_range(0..40_000),
            };
            let task = TaskSpec::new(app, workloads::generate_input(app, size, &mut rng));
            let l = local
                .run_local_at(&task, 50.0, &mut log)
                .map_err(|e| format!("{app} {i}: {e}"))?;
            let r = client
                .run_remote(&task)
                .map_err(|e| format!("{app} {i}: {e}"))?;
            check(l.output_payload == r.output_payload, || {
                format!("{app} input {i} differs")
            })?;
            count += 1;
        }
    }
    server.shutdown();

    for i in 0..200 {
        let n = rng.gen_range(1..=50);
        let input = workloads::random_graph(n, rng.gen_range(0..n * 4 + 1), 0..1000, &mut rng);
        let g = pathfinder::parse(&input).map_err(|e| e.to_string())?;
        let tree = pathfinder::shortest_path_tree(&g).map_err(|e| format!("graph {i}: {e}"))?;
        check(tree.dist == dijkstra(&g), || {
            format!("graph {i}: distances differ from Dijkstra")
        })?;
    }
    for i in 0..20 {
        let input = negative_cycle_graph(&mut rng);
        check(pathfinder::run(&input).is_err(), || {
            format!("negative-cycle graph {i} was accepted")
        })?;
    }
    let took = start.elapsed();
    check(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!(
        "{count} local/remote pairs identical; 200 Dijkstra graphs; 20 negative cycles; {took:.2?}"
    ))
}

// 9
fn protocol_fuzz() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let valid = Frame::request(1, b"1\n2\n".to_vec()).encode();
    for i in 0..10_000 {
        let len = rng.gen_range(0..64);
        let mut bytes: Vec<u8> = if rng.gen_bool(0.5) {
            (0..len).map(|_| rng.gen()).collect()
        } else {
            // Valid header prefix with random mutations.
            let mut b = valid[..rng.gen_range(0..=valid.len())].to_vec();
            for _ in 0..rng.gen_range(0..3) {
                if !b.is_empty() {
                    let j = rng.gen_range(0..b.len());
                    b[j] = rng.gen();
                }
            }
            b
        };
        if rng.gen_bool(0.1) {
            bytes.extend([0xFF; 8]);
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
            let _ = protocol::decode(&bytes, DEFAULT_MAX_PAYLOAD);
            let _ = protocol::read_frame(&mut &bytes[..], DEFAULT_MAX_PAYLOAD);
        }));
        check(outcome.is_ok(), || {
            format!("decoder panicked on input {i}: {bytes:?}")
        })?;
    }
    for i in 0..10_000 {
        let kind = [FrameKind::Request, FrameKind::Response, FrameKind::Error][rng.gen_range(0..3)];
        let payload: Vec<u8> = (0..rng.gen_range(0..256)).map(|_| rng.gen()).collect();
        let f = Frame {
            kind,
            application_id: rng.gen(),
            payload,
        };
        let bytes = f.encode();
        let (back, used) =
            protocol::decode(&bytes, DEFAULT_MAX_PAYLOAD).map_err(|e| format!("frame {i}: {e}"))?;
        check(back == f && used == bytes.len(), || {
            format!("frame {i} did not round-trip")
        })?;
    }
    Ok("10000 random prefixes without panic; 10000 frames round-trip".into())
}

// 10
fn simulator_invariants() -> Outcome {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().is_some_and(|n| n != "device.conf")
                && p.extension().is_some_and(|x| x == "conf")
        })
        .collect();
    entries.sort();
    for path in &entries {
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        let cfg = SweepConfig::load(path).map_err(|e| format!("{name}: {e}"))?;
        let rows = simulator::run_sweep(&cfg).map_err(|e| format!("{name}: {e}"))?;
        let of = |m: Mode| {
            rows.iter()
                .filter(|r| r.mode == m)
                .cloned()
                .collect::<Vec<_>>()
        };
        let (local, cloud) = (of(Mode::Local), of(Mode::Cloud));
        check(local.len() == cfg.steps && cloud.len() == cfg.steps, || {
            format!("{name}: row count")
        })?;
        check(
            rows.windows(2)
                .all(|w| w[0].factor_value <= w[1].factor_value),
            || format!("{name}: rows not ascending"),
        )?;
        match cfg.factor {
            Factor::Bandwidth | Factor::DelayTolerance => {
                check(local.iter().all(|r| r.energy == local[0].energy), || {
                    format!("{name}: local energy varies")
                })?;
            }
            _ => {}
        }
        if cfg.factor == Factor::Bandwidth {
            check(
                cloud
                    .windows(2)
                    .all(|w| w[1].energy <= w[0].energy && w[1].time <= w[0].time),
                || format!("{name}: cloud rows increase with bandwidth"),
            )?;
        }
        if cfg.factor == Factor::CpuWorkload {
            check(cloud.iter().all(|r| r.time == cloud[0].time), || {
                format!("{name}: cloud time varies")
            })?;
        }
    }
    check(entries.len() == 16, || {
        format!("expected 16 sweep configs, found {}", entries.len())
    })?;
    Ok(format!("{} shipped configs", entries.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("equation oracle", equation_oracle),
        ("EMA closed form", ema_closed_form),
        ("predictor oracle", predictor_oracle),
        ("decision workflow", decision_golden),
        ("break-even reproduction", breakeven_reproduction),
        ("delay-threshold curve", delay_threshold_shape),
        ("find_breakeven closed form", breakeven_closed_form),
        ("runtime equivalence", runtime_equivalence),
        ("protocol fuzz", protocol_fuzz),
        ("simulator invariants", simulator_invariants),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let outcome = panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
