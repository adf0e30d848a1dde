//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_RED` are reported but do not fail the run.

use std::collections::HashSet;
use std::time::Instant;

use gss::designs::{Design, WalkOverrides};
use gss::enumerate::{enumerate_noncontiguous_cycles, CycleSearch};
use gss::estimators::{horvitz_thompson, tie_probability, yhat_h, yhat_w, TieTable};
use gss::graph::{cycle_from_order, pinned, rook_contiguity, Graph, GridLayout, NodeId};
use gss::harness::commands::{reproduce, Overrides};
use gss::harness::config::GraphSpec;
use gss::harness::RunReport;
use gss::measures::{design_search, exact_support, moments, pr_single_unit, xi, Mode, SearchMeasure};
use gss::population::{stylized_3x3_population, Stylized};
use gss::rng::stream;
use gss::walker::{build_pair_chain, flow_residuals, run_walk, ties_in, StartMode, WalkConfig};
use rand::seq::SliceRandom;
use rand::Rng;

const KNOWN_RED: [u32; 3] = [1, 2, 7];

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn random_walk_case<R: Rng>(rng: &mut R) -> (Graph, WalkConfig) {
    let n = rng.gen_range(3..=30);
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: HashSet<(NodeId, NodeId)> = (0..n).map(|k| {
        let (a, b) = (order[k], order[(k + 1) % n]);
        (a.min(b), a.max(b))
    }).collect();
    let density = rng.gen_range(0.0..0.5);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                edges.insert((a, b));
            }
        }
    }
    let g = Graph::new(n, edges).unwrap();
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let z: f64 = raw.iter().sum();
    let r = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..2.0) };
    let cfg = WalkConfig::new(r, rng.gen_range(0.0..=1.0), raw.iter().map(|x| x / z).collect()).unwrap();
    (g, cfg)
}

fn fuzz_corpus() -> Vec<(Graph, WalkConfig)> {
    let mut rng = stream(2024, 1, 0);
    (0..200).map(|_| random_walk_case(&mut rng)).collect()
}

fn c1_stationary_law(corpus: &[(Graph, WalkConfig)]) -> Outcome {
    let devs: Vec<f64> = corpus.iter().map(|(g, c)| build_pair_chain(g, c).unwrap().closed_form_deviation()).collect();
    let bad = devs.iter().filter(|&&d| d >= 1e-10).count();
    let max = devs.iter().copied().fold(0.0, f64::max);
    outcome(bad == 0, format!("closed form vs iterated node law: {bad}/200 cases >= 1e-10, max deviation {max:.2e}"))
}

fn c2_flow_identities(corpus: &[(Graph, WalkConfig)]) -> Outcome {
    let mut worst = [0.0f64; 4];
    let mut bad = 0;
    for (g, c) in corpus {
        let f = flow_residuals(&build_pair_chain(g, c).unwrap());
        for (w, v) in worst.iter_mut().zip([f.mixed, f.forward_through, f.jump_triples, f.edge_inflow]) {
            *w = w.max(v);
        }
        bad += (f.max() >= 1e-10) as usize;
    }
    outcome(
        bad == 0,
        format!(
            "{bad}/200 cases >= 1e-10; max mixed {:.1e}, forward {:.1e}, triples {:.1e}, inflow {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn c3_exact_xi() -> Outcome {
    let rook = pinned::g1();
    let v = |d: Design| xi(&d, &rook, Mode::Exact).unwrap().value;
    let got = [
        v(Design::srswor(9, 2).unwrap()),
        v(Design::srswor(9, 3).unwrap()),
        v(Design::epsswor(&pinned::g4(), 2).unwrap()),
        v(Design::epsswor(&pinned::g4(), 3).unwrap()),
        v(Design::systematic_path(&pinned::ids(&pinned::GRTS_PATH_ORDER), 3).unwrap()),
    ];
    let want = [1.0 / 3.0, 62.0 / 84.0, 0.0, 4.0 / 9.0, 1.0 / 3.0];
    let pass = got.iter().zip(&want).all(|(a, b)| close(*a, *b, 1e-12));
    outcome(pass, format!("srswor {:.4}/{:.4}, G4 {:.4}/{:.4}, path {:.4}", got[0], got[1], got[2], got[3], got[4]))
}

fn c4_design_search() -> Outcome {
    let rook = rook_contiguity(GridLayout::square(3));
    let cands = enumerate_noncontiguous_cycles(&rook, usize::MAX, CycleSearch::Exhaustive).unwrap();
    let out = design_search(cands, &SearchMeasure::Xi { n: 3, contiguity: &rook }, usize::MAX).unwrap();
    let order: Vec<String> = out.best.cycle_order().unwrap().iter().map(|v| (v + 1).to_string()).collect();
    outcome(
        out.value <= 1.0 / 9.0 + 1e-12,
        format!("{} cycles, min xi(n=3) = {:.4} at ({})", out.evaluated(), out.value, order.join(",")),
    )
}

fn c5_lpm1_xi() -> Outcome {
    let rook = pinned::g1();
    let coords = GridLayout::square(3).index_coords();
    let v = |n: usize| {
        let d = Design::lpm1(&coords, &[n as f64 / 9.0; 9]).unwrap();
        xi(&d, &rook, Mode::MonteCarlo { reps: 10_000, seed: 5 }).unwrap().value
    };
    let (a, b) = (v(2), v(3));
    outcome(close(a, 0.116, 0.02) && close(b, 0.478, 0.02), format!("n=2 {a:.4} (0.116), n=3 {b:.4} (0.478)"))
}

fn pr_n1(g: &Graph, kind: Stylized, ratio: f64) -> f64 {
    let pop = stylized_3x3_population(kind, 2.0, ratio).unwrap();
    let d = Design::unequal_gss(g, &pop.pi, 2, WalkOverrides::default()).unwrap();
    pr_single_unit(&d, Mode::Exact).unwrap().value
}

fn c6_single_unit() -> Outcome {
    let all = enumerate_noncontiguous_cycles(&Graph::empty(9), usize::MAX, CycleSearch::Exhaustive).unwrap();
    let (mut count, mut lo, mut hi) = (0, f64::INFINITY, f64::NEG_INFINITY);
    let (mut plo, mut phi) = (f64::INFINITY, f64::NEG_INFINITY);
    for g in all {
        let a = pr_n1(&g, Stylized::Centre, 2.0);
        let b = pr_n1(&g, Stylized::Polar, 0.5);
        lo = lo.min(a);
        hi = hi.max(a);
        plo = plo.min(b);
        phi = phi.max(b);
        count += 1;
    }
    let g1_eq = pr_n1(&pinned::g1(), Stylized::Centre, 1.0);
    let g1_c2 = pr_n1(&pinned::g1(), Stylized::Centre, 2.0);
    let pass = close(lo, 0.1, 0.005)
        && close(hi, 0.1, 0.005)
        && close(plo, 0.07, 0.01)
        && close(phi, 0.07, 0.01)
        && close(g1_eq, 0.18, 0.02)
        && close(g1_c2, 0.20, 0.02);
    outcome(
        pass,
        format!(
            "{count} 9-cycles ratio 2: [{lo:.4}, {hi:.4}]; ratio 0.5: [{plo:.4}, {phi:.4}]; G1 equal {g1_eq:.4}, G1 ratio 2 {g1_c2:.4}"
        ),
    )
}

fn c7_unbiasedness() -> Outcome {
    // Exact HT over enumerable designs.
    let y9 = [1.0, 2.0, 1.0, 2.0, 3.0, 2.0, 1.0, 2.0, 1.0];
    let mut ht_worst: f64 = 0.0;
    let mut designs = vec![Design::srswor(9, 2).unwrap(), Design::srswor(9, 3).unwrap()];
    for n in 1..=4 {
        designs.push(Design::systematic_circular(&pinned::ids(&pinned::G4_ORDER), n).unwrap());
        designs.push(Design::epsswor(&pinned::g4(), n).unwrap());
        designs.push(Design::epsswor(&pinned::g5(), n).unwrap());
    }
    designs.push(Design::systematic_path(&pinned::ids(&pinned::GRTS_PATH_ORDER), 3).unwrap());
    for d in &designs {
        let pi = d.inclusion_probs();
        let e: f64 = exact_support(d).unwrap().iter().map(|(s, p)| p * horvitz_thompson(&s.distinct(), &y9, &pi).unwrap()).sum();
        ht_worst = ht_worst.max((e - 15.0).abs());
    }
    let ht_ok = ht_worst < 1e-10;

    // Monte Carlo Y_W on the table configurations, m = 2.
    let graphs = [pinned::g1(), pinned::g2(), pinned::g3(), pinned::g4(), pinned::g5()];
    let pops = [
        (Stylized::Centre, 1.0),
        (Stylized::Centre, 2.0),
        (Stylized::Corner, 1.0),
        (Stylized::Polar, 1.0),
        (Stylized::Polar, 0.5),
        (Stylized::Vortex, 1.0),
        (Stylized::Vortex, 0.5),
    ];
    let mut w_bad = Vec::new();
    let mut w_total = 0;
    for (gi, g) in graphs.iter().enumerate() {
        for (kind, ratio) in pops {
            let pop = stylized_3x3_population(kind, 2.0, ratio).unwrap();
            let d = Design::unequal_gss(g, &pop.pi, 2, WalkOverrides::default()).unwrap();
            let m = moments(&d, Mode::MonteCarlo { reps: 100_000, seed: 70 + gi as u64 }, |s| {
                Ok(yhat_w(&s.units, &pop.y, &pop.pi, 2.0))
            })
            .unwrap();
            w_total += 1;
            if (m.mean - pop.total()).abs() > 4.0 * m.se_mean {
                w_bad.push(format!("G{}/{kind}-{ratio}", gi + 1));
            }
        }
    }

    // Monte Carlo Y_H on a 5-cycle, r = 0.2, u ∝ (1..5), m = 8, given at least one tie.
    let g = cycle_from_order(&[0, 1, 2, 3, 4]).unwrap();
    let cfg = WalkConfig::new(0.2, 0.0, (1..=5).map(|k| k as f64 / 15.0).collect()).unwrap();
    let chain = build_pair_chain(&g, &cfg).unwrap();
    let table = TieTable::new(&chain, 6).unwrap();
    let y5 = [1.0, 4.0, 2.0, 5.0, 2.5];
    let mut vals = Vec::new();
    for k in 0..100_000u64 {
        let tr = run_walk(&g, &cfg, 8, StartMode::Stationary(&chain), &mut stream(77, 7, k)).unwrap();
        let ties = ties_in(&tr.states);
        if !ties.is_empty() {
            vals.push(yhat_h(&ties, &y5, &table).unwrap());
        }
    }
    let kh = vals.len() as f64;
    let mh = vals.iter().sum::<f64>() / kh;
    let seh = (vals.iter().map(|v| (v - mh).powi(2)).sum::<f64>() / (kh - 1.0) / kh).sqrt();
    let h_ok = (mh - 14.5).abs() <= 4.0 * seh;

    let pass = ht_ok && w_bad.is_empty() && h_ok;
    outcome(
        pass,
        format!(
            "HT exact max |E-Y| {ht_worst:.1e}; Y_W outside 4se in {}/{w_total} ({}); Y_H {mh:.4} vs 14.5, se {seh:.4}",
            w_bad.len(),
            w_bad.join(" ")
        ),
    )
}

/// Simple connected graphs with minimum degree 2 on `n` nodes, one per
/// isomorphism class.
fn walkable_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
    {
        let mut p: Vec<usize> = (0..n).collect();
        // Heap's algorithm.
        let mut c = vec![0; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 { p.swap(0, i) } else { p.swap(c[i], i) }
                perms.push(p.clone());
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
    }
    let index = |a: usize, b: usize| pairs.iter().position(|&e| e == (a.min(b), a.max(b))).unwrap();
    let maps: Vec<Vec<usize>> = perms.iter().map(|p| pairs.iter().map(|&(a, b)| index(p[a], p[b])).collect()).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let canon = maps
            .iter()
            .map(|m| (0..pairs.len()).filter(|&k| mask >> k & 1 == 1).fold(0u32, |acc, k| acc | 1 << m[k]))
            .min()
            .unwrap();
        if !seen.insert(canon) || canon != mask {
            continue;
        }
        let g = Graph::new(n, (0..pairs.len()).filter(|&k| mask >> k & 1 == 1).map(|k| pairs[k])).unwrap();
        if g.is_connected() && g.min_degree() >= 2 {
            out.push(g);
        }
    }
    out
}

fn c8_tie_oracle() -> Outcome {
    let mut rng = stream(8, 8, 0);
    let (mut graphs, mut worst) = (0, 0.0f64);
    for n in 3..=6 {
        for g in walkable_graphs(n) {
            graphs += 1;
            for _ in 0..2 {
                let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
                let z: f64 = raw.iter().sum();
                let cfg = WalkConfig::new(rng.gen_range(0.05..1.5), 0.0, raw.iter().map(|x| x / z).collect()).unwrap();
                let chain = build_pair_chain(&g, &cfg).unwrap();
                for order in 1..=4 {
                    let windows = chain.windows(order + 2);
                    for h in 0..n {
                        let oracle: f64 = windows
                            .iter()
                            .filter(|(w, _)| w[0] != h && w[order + 1] != h && w[1..=order].iter().all(|&v| v == h))
                            .map(|(_, p)| p)
                            .sum();
                        worst = worst.max((tie_probability(&chain, h, order).unwrap() - oracle).abs());
                    }
                }
            }
        }
    }
    outcome(worst < 1e-10, format!("{graphs} graphs (N 3..6, up to isomorphism), orders 1..4, max gap {worst:.1e}"))
}

fn c9_table1(report: &RunReport) -> Outcome {
    let published: [(&str, [f64; 2]); 7] = [
        ("centre-1", [1.27, 0.87]),
        ("centre-2", [0.32, 0.84]),
        ("corner-1", [1.91, 0.66]),
        ("polar-1", [1.40, 0.65]),
        ("polar-0.5", [1.08, 0.66]),
        ("vortex-1", [1.27, 0.88]),
        ("vortex-0.5", [0.45, 0.74]),
    ];
    let mut misses = Vec::new();
    for (pop, vals) in published {
        for (d, v) in ["g1", "g4"].iter().zip(vals) {
            let got = report.get(d, pop, "re").unwrap().value;
            if !close(got, v, 0.15) {
                misses.push(format!("{d}/{pop} {got:.3} vs {v}"));
            }
        }
    }
    for d in ["g2", "g4", "g5"] {
        for pop in ["centre-1", "vortex-1"] {
            let got = report.get(d, pop, "re").unwrap().value;
            if got >= 1.0 {
                misses.push(format!("{d}/{pop} RE {got:.3} >= 1"));
            }
        }
    }
    outcome(misses.is_empty(), format!("14 pinned cells within 0.15, 6 directional cells; misses: [{}]", misses.join("; ")))
}

fn c10_table2(report: &RunReport) -> Outcome {
    let re = |d: &str, p: &str| report.get(d, p, "re").unwrap().value;
    let essb = |d: &str| report.get(d, "sintrend", "essb").unwrap().value;
    let mut misses = Vec::new();
    for p in ["centre", "vortex"] {
        if !(re("g6", p) < 0.1 && re("g6", p) < re("lpm1", p)) {
            misses.push(format!("g6/{p}"));
        }
    }
    for p in ["sintrend", "corner"] {
        if re("g7", p) >= re("lpm1", p) {
            misses.push(format!("g7/{p}"));
        }
    }
    if essb("lpm1") >= essb("g7") {
        misses.push("essb order".into());
    }
    let published = [
        ("lpm1", [0.151, 0.248, 0.127, 0.221, 0.244, 0.080]),
        ("g6", [0.561, 0.025, 0.801, 0.060, 0.025, 0.079]),
        ("g7", [0.044, 1.371, 0.016, 1.047, 1.362, 0.192]),
    ];
    for (d, vals) in published {
        for (k, p) in ["sintrend", "centre", "corner", "polar", "vortex", "essb"].iter().enumerate() {
            let got = if *p == "essb" { essb(d) } else { re(d, p) };
            if !(got >= vals[k] / 2.0 && got <= vals[k] * 2.0) {
                misses.push(format!("{d}/{p} {got:.3} vs {}", vals[k]));
            }
        }
    }
    outcome(
        misses.is_empty(),
        format!(
            "G6 centre {:.3} vortex {:.3}; G7 sintrend {:.3} corner {:.3}; ESSB lpm1 {:.3} g7 {:.3}; misses: [{}]",
            re("g6", "centre"),
            re("g6", "vortex"),
            re("g7", "sintrend"),
            re("g7", "corner"),
            essb("lpm1"),
            essb("g7"),
            misses.join("; ")
        ),
    )
}

fn inclusion_check(cycle: &Graph, n: usize, reps: u64, seed: u64) -> (usize, f64) {
    let d = Design::epsswor(cycle, n).unwrap();
    let big_n = cycle.n_nodes();
    let mut hits = vec![0u64; big_n];
    for k in 0..reps {
        for u in d.draw(&mut stream(seed, 11, k)).unwrap().distinct() {
            hits[u] += 1;
        }
    }
    let p = n as f64 / big_n as f64;
    let sd = (p * (1.0 - p) / reps as f64).sqrt();
    let z: Vec<f64> = hits.iter().map(|&h| (h as f64 / reps as f64 - p).abs() / sd).collect();
    (z.iter().filter(|&&v| v > 4.0).count(), z.iter().copied().fold(0.0, f64::max))
}

fn c11_epsswor_uniformity() -> Outcome {
    let g6 = GraphSpec::Recursive { side: 20, parts_per_side: 4, seed: 1 }.build().unwrap();
    let (a, za) = inclusion_check(&pinned::g4(), 3, 100_000, 1);
    let (b, zb) = inclusion_check(&g6, 16, 100_000, 2);
    outcome(a == 0 && b == 0, format!("G4 n=3 max |z| {za:.2}; G6-family n=16 max |z| {zb:.2}"))
}

fn main() {
    let corpus = fuzz_corpus();
    let t1 = reproduce("t1", &Overrides::default()).expect("t1 runs").0;
    let t2 = reproduce("t2", &Overrides::default()).expect("t2 runs").0;
    let criteria: Vec<Criterion> = vec![
        (1, "stationary law closed form", Box::new(|| c1_stationary_law(&corpus))),
        (2, "mixed equation and flow identities", Box::new(|| c2_flow_identities(&corpus))),
        (3, "exact xi on pinned graphs", Box::new(c3_exact_xi)),
        (4, "design search reaches xi <= 1/9", Box::new(c4_design_search)),
        (5, "LPM1 xi", Box::new(c5_lpm1_xi)),
        (6, "Pr(n=1)", Box::new(c6_single_unit)),
        (7, "estimator unbiasedness", Box::new(c7_unbiasedness)),
        (8, "tie probability oracle", Box::new(c8_tie_oracle)),
        (9, "3x3 relative efficiency table", Box::new(|| c9_table1(&t1))),
        (10, "20x20 relative efficiency and ESSB", Box::new(|| c10_table2(&t2))),
        (11, "EpSSWoR inclusion uniformity", Box::new(c11_epsswor_uniformity)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in &criteria {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} criterion {id:>2} {name}: {} ({:.1}s)", o.detail, start.elapsed().as_secs_f64());
        if !o.pass && !KNOWN_RED.contains(id) {
            unexpected.push(*id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
