//! Subcommands. Each returns a JSON value; domain failures are `GspError`s.

use crate::input::{load_gsp, load_matrix, load_value, parse_seq, parse_vertex};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gspecies::counterexample::{counterexample_search, DualConvention};
use gspecies::fixtures;
use gspecies::gsp::Gsp;
use gspecies::json::{fg_to_json, gsp_to_json, matrix_to_json, mutation_report_to_json, poly_to_json, rep_from_json, rep_to_json, species_to_json};
use gspecies::mutation::{mutate, probe_nondegeneracy};
use gspecies::reps::{f_polynomial, g_vector, h_vector, mutate_gspdr_sequence, mutate_rep, reduce_classes, DecoratedRep, Regime};
use gspecies::seed::{compute_fg, find_skew_symmetrizer, principal_fg, specialize_poly, ExchangeMatrix};
use gspecies::species::species_from_matrix;
use gspecies::verify::{self, SuiteReport};
use gspecies::{Exec, GspError, Result};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "gspecies", version, about = "Mutation of group species with potentials and their decorated representations")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Run fan-out work on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Pretty,
}

#[derive(Args, Debug, Clone)]
pub struct SpeciesArg {
    /// GSP or species JSON (file or inline), a matrix, or one of c3, rank2, three-cycle, counterexample.
    #[arg(long)]
    pub species: String,
    /// Truncation degree N when the input carries no potential.
    #[arg(long)]
    pub trunc: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exchange matrix of a species.
    BMatrix(SpeciesArg),
    /// Locally free species realizing a skew-symmetrizable matrix.
    SpeciesFromMatrix {
        #[arg(long)]
        matrix: String,
        /// Group orders, comma separated; the minimal symmetrizer by default.
        #[arg(long)]
        d: Option<String>,
    },
    /// Mutate a GSP at one vertex or along a sequence.
    Mutate {
        #[command(flatten)]
        input: SpeciesArg,
        #[arg(long, conflicts_with = "seq")]
        at: Option<String>,
        #[arg(long)]
        seq: Option<String>,
        #[arg(long, value_enum, default_value_t = Emit::Gsp)]
        emit: Emit,
    },
    /// F-polynomials and g-vectors from the exchange matrix.
    Fg {
        #[arg(long, required_unless_present = "species")]
        matrix: Option<String>,
        #[arg(long)]
        species: Option<String>,
        #[arg(long, default_value = "")]
        seq: String,
        /// One vertex; all vertices when omitted.
        #[arg(long)]
        vertex: Option<String>,
        /// Principal-coefficient recursion instead of the tropical one.
        #[arg(long)]
        principal: bool,
    },
    /// Mutate a decorated representation.
    RepMutate {
        #[command(flatten)]
        input: SpeciesArg,
        #[arg(long, default_value = "")]
        seq: String,
        /// Characters of the negative simple decoration on the mutated GSP, mutated back along the sequence.
        #[arg(long, conflicts_with = "rep")]
        decoration: Option<String>,
        /// Representation JSON over the input GSP, mutated forward along the sequence.
        #[arg(long)]
        rep: Option<String>,
        /// Skip the F-polynomial.
        #[arg(long)]
        no_f: bool,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, conflicts_with = "species")]
        matrix: Option<String>,
        #[arg(long)]
        species: Option<String>,
        /// Random inputs for the involution and compatibility suites.
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
    /// The worked C3 example: species, matrix, F and g along (2,1,3) and the final representation.
    ExampleC3,
    /// Exhaustive instance search for the 6×6 matrix without a non-degenerate realization.
    Counterexample {
        #[arg(long, default_value = "1,2")]
        m: String,
        #[arg(long, value_enum, default_value_t = Convention::Transpose)]
        convention: Convention,
    },
    /// Random potentials, every sequence up to a length, stop at the first non-2-acyclic result.
    Probe {
        #[command(flatten)]
        input: SpeciesArg,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long, default_value_t = 4)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        max_deg: usize,
        #[arg(long, default_value_t = 3)]
        coeff: i64,
    },
    /// HTTP JSON service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Gsp,
    Species,
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    DualEngine,
    Conjectures,
    EInvariant,
    ClusterCharacter,
    Involution,
    BCompat,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Transpose,
    Inverted,
}

impl Cli {
    pub fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => gspecies::json::canonical(v),
        Format::Pretty => serde_json::to_string_pretty(v).expect("JSON values serialize"),
    }
}

/// Every subcommand except `serve`.
pub fn run(cli: &Cli) -> Result<Value> {
    let exec = cli.exec();
    match &cli.command {
        Command::BMatrix(a) => Ok(matrix_to_json(&load_gsp(&a.species, a.trunc)?.species().exchange_matrix()?)),
        Command::SpeciesFromMatrix { matrix, d } => {
            let b = load_matrix(matrix)?;
            let d: Vec<i64> = match d {
                Some(s) => s
                    .split(',')
                    .map(|x| x.trim().parse().map_err(|_| GspError::Invalid(format!("bad group order {x}"))))
                    .collect::<Result<_>>()?,
                None => find_skew_symmetrizer(&b)?,
            };
            Ok(species_to_json(&species_from_matrix(&b, &d)?))
        }
        Command::Mutate { input, at, seq, emit } => {
            let g = load_gsp(&input.species, input.trunc)?;
            let seq = match (at, seq) {
                (Some(k), _) => vec![parse_vertex(k, &g.labels)?],
                (None, Some(s)) => parse_seq(s, &g.labels)?,
                (None, None) => return Err(GspError::Invalid("give --at or --seq".into())),
            };
            mutate_cmd(&g, &seq, *emit)
        }
        Command::Fg { matrix, species, seq, vertex, principal } => {
            let b = match (matrix, species) {
                (Some(m), _) => load_matrix(m)?,
                (None, Some(s)) => load_gsp(s, None)?.species().exchange_matrix()?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            fg_cmd(&b, &parse_seq(seq, &b.labels)?, vertex.as_deref(), *principal)
        }
        Command::RepMutate { input, seq, decoration, rep, no_f } => {
            let g = load_gsp(&input.species, input.trunc)?;
            let seq = parse_seq(seq, &g.labels)?;
            let (end, r) = match (decoration, rep) {
                (Some(d), _) => {
                    let frame = g.frame();
                    let mut deco = vec![0; g.num_chars()];
                    for c in d.split(',').map(str::trim).filter(|x| !x.is_empty()) {
                        deco[frame.parse_char_name(c)?] += 1;
                    }
                    mutate_gspdr_sequence(&g, &deco, &seq)?
                }
                (None, Some(path)) => {
                    let mut cur = g.clone();
                    let mut r = rep_from_json(&g, &load_value(path)?)?;
                    for &k in &seq {
                        let (ng, nr) = mutate_rep(&cur, &r, k)?;
                        cur = ng;
                        r = nr;
                    }
                    (cur, r)
                }
                (None, None) => return Err(GspError::Invalid("give --decoration or --rep".into())),
            };
            rep_report(&end, &r, !no_f, exec)
        }
        Command::Verify { suite, max_len, matrix, species, random } => verify_cmd(cli, *suite, *max_len, matrix.as_deref(), species.as_deref(), *random),
        Command::ExampleC3 => example_c3(exec),
        Command::Counterexample { m, convention } => {
            let ms: Vec<u32> = m
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| GspError::Invalid(format!("bad m {x}"))))
                .collect::<Result<_>>()?;
            let conv = match convention {
                Convention::Transpose => DualConvention::Transpose,
                Convention::Inverted => DualConvention::InvertedTranspose,
            };
            let r = counterexample_search(&ms, conv, exec);
            let mut v = serde_json::to_value(&r).expect("report serializes");
            v["confirms"] = json!(r.confirms());
            Ok(v)
        }
        Command::Probe { input, max_len, trials, max_deg, coeff } => {
            let g = load_gsp(&input.species, input.trunc)?;
            let r = probe_nondegeneracy(&g, *max_len, *trials, *max_deg, *coeff, cli.seed, exec);
            let failures: Vec<Value> = r
                .failures
                .iter()
                .map(|f| json!({"trial": f.trial, "sequence": f.sequence.iter().map(|&i| g.labels[i].clone()).collect::<Vec<_>>(), "reason": f.reason}))
                .collect();
            Ok(json!({"trials": r.trials, "max_len": r.max_len, "sequences_checked": r.sequences_checked, "failures": failures, "success": r.success(), "seed": cli.seed}))
        }
        Command::Serve { .. } => Err(GspError::Invalid("serve is handled by the binary".into())),
    }
}

pub fn mutate_cmd(g: &Gsp, seq: &[usize], emit: Emit) -> Result<Value> {
    let mut cur = g.clone();
    let mut reports = Vec::new();
    for (pos, &k) in seq.iter().enumerate() {
        let r = mutate(&cur, k).map_err(|e| match e {
            GspError::NotTwoAcyclicAtK { .. } if pos > 0 => GspError::MutationUndefined { prefix: seq[..pos].iter().map(|&i| g.labels[i].clone()).collect(), reason: e.to_string() },
            e => e,
        })?;
        cur = r.reduced().clone();
        reports.push(r);
    }
    Ok(match emit {
        Emit::Gsp => gsp_to_json(&cur),
        Emit::Species => species_to_json(&cur.species()),
        Emit::Report => Value::Array(reports.iter().map(mutation_report_to_json).collect()),
    })
}

pub fn fg_cmd(b: &ExchangeMatrix, seq: &[usize], vertex: Option<&str>, principal: bool) -> Result<Value> {
    let one = |k: usize| -> Result<Value> {
        let p = if principal { principal_fg(b, seq, k)? } else { compute_fg(b, seq, k)? };
        let mut v = fg_to_json(&p);
        v["vertex"] = json!(b.labels[k]);
        Ok(v)
    };
    let seq_labels: Vec<String> = seq.iter().map(|&i| b.labels[i].clone()).collect();
    match vertex {
        Some(k) => {
            let mut v = one(parse_vertex(k, &b.labels)?)?;
            v["seq"] = json!(seq_labels);
            Ok(v)
        }
        None => Ok(json!({"seq": seq_labels, "vertices": (0..b.size()).map(one).collect::<Result<Vec<_>>>()?})),
    }
}

pub fn rep_report(g: &Gsp, r: &DecoratedRep, with_f: bool, exec: Exec) -> Result<Value> {
    let gv = g_vector(g, r)?;
    let mut v = json!({
        "gsp": gsp_to_json(g),
        "rep": rep_to_json(g, r),
        "g": gv,
        "g_reduced": reduce_classes(g, &gv),
        "h": h_vector(g, r)?,
        "reduced_dims": r.reduced_dims(g),
    });
    if with_f {
        let f = f_polynomial(g, r, Regime::Counting, exec)?;
        v["F"] = poly_to_json(&f.poly);
        v["F_specialized"] = poly_to_json(&specialize_poly(&f.poly, &g.char_vertex(), g.labels.len()));
        v["assumes_polynomial_count"] = json!(f.assumes_polynomial_count);
    }
    Ok(v)
}

fn suites_json(subject: &str, suites: Vec<SuiteReport>) -> Value {
    let passed = suites.iter().all(|s| s.passed());
    json!({"subject": subject, "passed": passed, "suites": suites})
}

fn verify_cmd(cli: &Cli, suite: Suite, max_len: usize, matrix: Option<&str>, species: Option<&str>, random: usize) -> Result<Value> {
    let exec = cli.exec();
    let arg = species.or(matrix).unwrap_or("c3");
    let g = load_gsp(arg, None)?;
    let subject = if crate::input::BUILTINS.contains(&arg) { arg.to_string() } else { "input".to_string() };
    let mut inputs = vec![(subject.clone(), g.clone())];
    if random > 0 {
        inputs.extend(fixtures::random_gsps(random, cli.seed, 6).into_iter().enumerate().map(|(i, g)| (format!("random-{}-{i}", cli.seed), g)));
    }
    let mut suites = Vec::new();
    match suite {
        Suite::All => {
            suites.extend(verify::verify_all(&subject, &g, max_len, exec).suites);
            suites.extend(verify::involution_suites(&inputs, exec, 3));
            suites.push(verify::b_compat_suite(&inputs, exec));
        }
        Suite::DualEngine => {
            let (a, b, _) = verify::dual_engine_suite(&subject, &g, max_len, exec);
            suites.extend([a, b]);
        }
        Suite::Conjectures => suites.extend(verify::conjecture_suites(&g.species().exchange_matrix()?, max_len, exec, 2)),
        Suite::EInvariant => {
            let (_, _, real) = verify::dual_engine_suite(&subject, &g, max_len, exec);
            suites.push(verify::e_invariant_suite(&subject, &real, exec));
        }
        Suite::ClusterCharacter => {
            let (_, _, real) = verify::dual_engine_suite(&subject, &g, max_len, exec);
            suites.push(verify::cluster_character_suite(&subject, &g, &real));
        }
        Suite::Involution => suites.extend(verify::involution_suites(&inputs, exec, 3)),
        Suite::BCompat => suites.push(verify::b_compat_suite(&inputs, exec)),
        Suite::Oracle => suites.push(verify::derivative_oracle_suite(max_len.min(4), cli.seed)),
    }
    Ok(suites_json(&subject, suites))
}

/// Species, matrix, F and g for (2,1,3) at vertex 3, and the representation realizing them.
pub fn example_c3(exec: Exec) -> Result<Value> {
    let g = fixtures::c3_gsp();
    let b = g.species().exchange_matrix()?;
    let seq = vec![1, 0, 2];
    let fg = compute_fg(&b, &seq, 2)?;
    let (end, r) = mutate_gspdr_sequence(&g, &[0, 0, 1, 0], &seq)?;
    Ok(json!({
        "species": species_to_json(&g.species()),
        "b_matrix": matrix_to_json(&b),
        "seq": ["2", "1", "3"],
        "vertex": "3",
        "fg": fg_to_json(&fg),
        "representation": rep_report(&end, &r, true, exec)?,
    }))
}
