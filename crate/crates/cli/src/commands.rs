use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use gptdim_core::composition::{self, BoxCorrelationLabel, NsBox};
use gptdim_core::dimensions::{self, DimensionOptions, Route};
use gptdim_core::io::SystemFile;
use gptdim_core::protocols::{self, BitString, CcLimits, TruthTable};
use gptdim_core::thermo;
use gptdim_core::{make_classical, make_gbit, make_hypercube, Error, GptSystem};

use crate::report::{read_input, write_output, Report};
use crate::{CliError, Command, ProtocolCommand, Sources};

type Outcome = Result<Report, CliError>;

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn load(sources: &Sources, inputs: &mut Vec<Value>) -> Result<Vec<GptSystem>, CliError> {
    let mut out = Vec::new();
    for _ in 0..sources.gbit {
        out.push(make_gbit());
    }
    for &d in &sources.hypercube {
        out.push(make_hypercube(d)?);
    }
    for &d in &sources.classical {
        out.push(make_classical(d)?);
    }
    for &k in &sources.amplify {
        out.push(composition::amplify(k, sources.amplify_cap)?);
    }
    for path in &sources.files {
        let text = read_input(path, inputs)?;
        out.push(SystemFile::parse(&text)?.to_system()?);
    }
    Ok(out)
}

fn load_exactly(sources: &Sources, count: usize, inputs: &mut Vec<Value>) -> Result<Vec<GptSystem>, CliError> {
    let systems = load(sources, inputs)?;
    if systems.len() != count {
        return Err(Error::InvalidArgument(format!(
            "expected {count} system source(s), got {}",
            systems.len()
        ))
        .into());
    }
    Ok(systems)
}

pub fn run(command: Command, echo: Vec<String>) -> Outcome {
    let mut inputs = Vec::new();
    let (results, text) = match command {
        Command::Dims {
            source,
            certify,
            certify_limit,
            lp_only,
        } => dims(&source, certify, certify_limit, lp_only, &mut inputs)?,
        Command::Compose { gbits, output } => compose(gbits, output)?,
        Command::Project { file, output } => project(&file, output, &mut inputs)?,
        Command::Iso { source } => iso(&source, &mut inputs)?,
        Command::Export { source, output } => export(&source, output, &mut inputs)?,
        Command::Protocol { which } => protocol(which, &mut inputs)?,
        Command::Demon {
            dimension,
            decisions,
            seed,
            temperature,
        } => demon(dimension, decisions, seed, temperature)?,
    };
    Ok(Report {
        command: echo,
        inputs,
        results,
        text,
    })
}

type Body = Result<(Value, String), CliError>;

fn dims(
    source: &Sources,
    certify: bool,
    certify_limit: Option<usize>,
    lp_only: bool,
    inputs: &mut Vec<Value>,
) -> Body {
    let sys = load_exactly(source, 1, inputs)?.remove(0);
    let options = DimensionOptions {
        certify_limit: if certify { Some(usize::MAX) } else { certify_limit },
        route: if lp_only { Route::LpOnly } else { Route::Auto },
    };
    let report = dimensions::dimension_report(&sys, &options)?;
    report.verify(&sys)?;
    let mut text = String::new();
    let _ = writeln!(text, "system      {}", report.system);
    let _ = writeln!(text, "vertices    {}", report.vertex_count);
    let _ = writeln!(text, "pairs       {} distinguishable", report.edge_count);
    if report.d_m_exact {
        let _ = writeln!(text, "d_m         {}", report.d_m);
    } else {
        let _ = writeln!(text, "d_m         >= {} (lower bound, pass --certify)", report.d_m);
    }
    let _ = writeln!(text, "d_i         {}", report.d_i);
    let _ = writeln!(text, "d_m states  {:?}", report.d_m_witness.states);
    let _ = writeln!(text, "d_i clique  {:?}", report.d_i_witness);
    let mut v = to_value(&report);
    v["verified"] = json!(true);
    Ok((v, text))
}

fn compose(gbits: usize, output: Option<PathBuf>) -> Body {
    if gbits != 2 {
        return Err(Error::InvalidArgument(format!(
            "only the two-g-bit polytope is enumerated (got --gbits {gbits}); use --amplify for the projected system"
        ))
        .into());
    }
    let boxes = composition::maximal_tensor_gbits()?;
    let gbit = make_gbit();
    let mut steering = true;
    for b in &boxes {
        steering &= composition::steering_check(b, &gbit)?;
    }
    // Validates non-redundancy of every vertex.
    let states: Vec<_> = boxes.iter().map(NsBox::to_state).collect();
    GptSystem::new("maximal tensor product of two g-bits", NsBox::joint_shape(2), states)?;
    let deterministic = boxes.iter().filter(|b| b.is_deterministic()).count();
    let uniform: Vec<&NsBox> = boxes.iter().filter(|b| b.has_uniform_marginals()).collect();
    let labels: Vec<BoxCorrelationLabel> = uniform
        .iter()
        .filter_map(|b| b.parity_function())
        .map(|f| BoxCorrelationLabel::from_function(&f))
        .collect();
    let file = SystemFile::from_boxes("maximal tensor product of two g-bits", &boxes)?;
    if let Some(path) = &output {
        write_output(path, &file.to_json())?;
    }
    let mut text = String::new();
    let _ = writeln!(text, "vertices           {}", boxes.len());
    let _ = writeln!(text, "deterministic      {deterministic}");
    let _ = writeln!(text, "uniform marginals  {}", uniform.len());
    let _ = writeln!(text, "steering           {}", if steering { "ok" } else { "FAILED" });
    for l in &labels {
        let _ = writeln!(
            text,
            "  a1^a2 = {}x1x2 ^ {}x1 ^ {}x2 ^ {}",
            l.alpha as u8, l.beta as u8, l.gamma as u8, l.delta as u8
        );
    }
    let v = json!({
        "vertex_count": boxes.len(),
        "deterministic_locals": deterministic,
        "uniform_marginals": uniform.len(),
        "no_signaling": true,
        "extremal": true,
        "steering": steering,
        "correlation_labels": labels,
        "boxes": file,
    });
    Ok((v, text))
}

fn project(file: &Path, output: Option<PathBuf>, inputs: &mut Vec<Value>) -> Body {
    let text = read_input(file, inputs)?;
    let boxes = SystemFile::parse(&text)?.to_boxes()?;
    let sys = composition::project_system("parity projection", &boxes)?;
    let out = SystemFile::from_system(&sys);
    if let Some(path) = &output {
        write_output(path, &out.to_json())?;
    }
    let summary = format!(
        "boxes       {}\nprojected   {} distinct states over {} settings\ndeterministic {}\n",
        boxes.len(),
        sys.vertex_count(),
        sys.shape().setting_count(),
        sys.all_deterministic()
    );
    let v = json!({
        "box_count": boxes.len(),
        "vertex_count": sys.vertex_count(),
        "settings": sys.shape().setting_count(),
        "all_deterministic": sys.all_deterministic(),
        "system": out,
    });
    Ok((v, summary))
}

fn iso(source: &Sources, inputs: &mut Vec<Value>) -> Body {
    let systems = load_exactly(source, 2, inputs)?;
    let found = composition::find_isomorphism(&systems[0], &systems[1]);
    let text = format!(
        "{} vs {}: {}\n",
        systems[0].name(),
        systems[1].name(),
        if found.is_some() { "isomorphic" } else { "not isomorphic" }
    );
    let v = json!({
        "systems": [systems[0].name(), systems[1].name()],
        "isomorphic": found.is_some(),
        "relabeling": found,
    });
    Ok((v, text))
}

fn export(source: &Sources, output: Option<PathBuf>, inputs: &mut Vec<Value>) -> Body {
    let sys = load_exactly(source, 1, inputs)?.remove(0);
    let file = SystemFile::from_system(&sys);
    let json = file.to_json();
    if let Some(path) = &output {
        write_output(path, &json)?;
    }
    Ok((to_value(&file), json))
}

fn parse_bits(s: &str) -> Result<BitString, CliError> {
    Ok(s.parse::<BitString>()?)
}

fn protocol(which: ProtocolCommand, inputs: &mut Vec<Value>) -> Body {
    match which {
        ProtocolCommand::Index {
            bits,
            k,
            sample,
            n,
            seed,
        } => match (bits, k, sample, n) {
            (Some(bits), Some(k), None, _) => {
                let b = parse_bits(&bits)?;
                let (out, transcript) = protocols::index_protocol(&b, k)?;
                let replayed = transcript.replay()?;
                let text = format!("b = {b}, k = {k} -> {}\n", out as u8);
                let v = json!({
                    "bits": b,
                    "k": k,
                    "output": out,
                    "correct": out == b.get(k)?,
                    "replayed": replayed == out,
                    "transcript": transcript,
                });
                Ok((v, text))
            }
            (None, None, sample, Some(n)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let runs: Vec<(BitString, usize)> = match sample {
                    Some(count) => (0..count)
                        .map(|_| -> Result<_, CliError> {
                            let bits = (0..n).map(|_| rng.gen()).collect();
                            Ok((BitString::new(bits)?, rng.gen_range(1..=n.max(1))))
                        })
                        .collect::<Result<_, _>>()?,
                    None => {
                        if n > 16 {
                            return Err(Error::CapExceeded {
                                what: "exhaustive index-protocol length",
                                requested: n as u128,
                                cap: 16,
                            }
                            .into());
                        }
                        BitString::all(n)
                            .flat_map(|b| (1..=n).map(move |k| (b.clone(), k)))
                            .collect()
                    }
                };
                let mut correct = 0;
                for (b, k) in &runs {
                    if protocols::index_protocol(b, *k)?.0 == b.get(*k)? {
                        correct += 1;
                    }
                }
                let mode = if sample.is_some() { "sampled" } else { "exhaustive" };
                let text = format!("{mode}: {correct}/{} runs correct\n", runs.len());
                let v = json!({
                    "n": n,
                    "mode": mode,
                    "seed": sample.map(|_| seed),
                    "runs": runs.len(),
                    "correct": correct,
                });
                Ok((v, text))
            }
            _ => Err(Error::InvalidArgument(
                "use --bits B --k K, or --n N with optional --sample COUNT".into(),
            )
            .into()),
        },
        ProtocolCommand::Ic { n, classical_bit } => {
            let r = if classical_bit {
                protocols::ic_quantity_classical_bit(n)?
            } else {
                protocols::ic_quantity(n)?
            };
            let verdict = if r.violated {
                "information causality violated"
            } else {
                "information causality satisfied"
            };
            let text = format!(
                "n = {}: total {:.1} bits, capacity {:.1} bits, {verdict}\n",
                r.n, r.total, r.capacity
            );
            let mut v = to_value(&r);
            v["verdict"] = json!(verdict);
            Ok((v, text))
        }
        ProtocolCommand::Cc {
            table,
            function,
            width,
            max_alice_bits,
            max_bob_bits,
        } => {
            let f = match (table, function.as_deref()) {
                (Some(path), _) => TruthTable::parse(&read_input(&path, inputs)?)?,
                (None, Some("inner-product")) => TruthTable::inner_product(width)?,
                (None, Some("equality")) => TruthTable::equality(width)?,
                (None, Some("constant")) => TruthTable::constant(width, width, false)?,
                (None, Some("xor-first")) => TruthTable::xor_first_bits(width, width)?,
                (None, other) => {
                    return Err(Error::InvalidArgument(format!("unknown function {other:?}")).into())
                }
            };
            let limits = CcLimits {
                max_alice_bits,
                max_bob_bits,
            };
            let r = protocols::cc_protocol(&f, &limits)?;
            let text = format!(
                "{}/{} correct, C = {} bit\n",
                r.correct, r.pairs, r.communication_bits
            );
            Ok((to_value(&r), text))
        }
        ProtocolCommand::PrboxSim { zeta, k } => {
            let z = parse_bits(&zeta)?;
            let sim = protocols::simulate_hypercube_with_prboxes(&z, k)?;
            let direct = protocols::index_protocol(&z, k)?.0;
            let agrees = sim.point_mass() == Some(direct);
            let text = format!(
                "zeta = {z}, k = {k}: P(0) = {}, P(1) = {}, direct {}, {} classical bit(s)\n",
                sim.distribution[0], sim.distribution[1], direct as u8, sim.message_bits
            );
            let mut v = to_value(&sim);
            v["direct_output"] = json!(direct);
            v["agrees"] = json!(agrees);
            Ok((v, text))
        }
    }
}

fn demon(dimension: usize, decisions: Option<String>, seed: u64, temperature: Option<f64>) -> Body {
    let decisions = match decisions {
        Some(s) => {
            let b = parse_bits(&s)?;
            if b.len() != dimension {
                return Err(Error::InvalidArgument(format!(
                    "--decisions has {} bits but --D is {dimension}",
                    b.len()
                ))
                .into());
            }
            b
        }
        None => {
            if dimension > thermo::MAX_MEMORY_DIMENSION {
                return Err(Error::CapExceeded {
                    what: "demon memory dimension",
                    requested: dimension as u128,
                    cap: thermo::MAX_MEMORY_DIMENSION as u128,
                }
                .into());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            BitString::new((0..dimension).map(|_| rng.gen()).collect())?
        }
    };
    let r = thermo::demon_protocol(&decisions, temperature)?;
    let mut readback = true;
    for k in 1..=decisions.len() {
        readback &= thermo::readback(&decisions, k)? == decisions.get(k)?;
    }
    let mut text = String::new();
    let _ = writeln!(text, "decisions      {}", r.decisions);
    let _ = writeln!(text, "stored         {} bits", r.stored_bits);
    let _ = writeln!(text, "erasure cost   {} bit-units", r.total_cost_bits);
    let _ = writeln!(text, "Landauer bound {} bit-units", r.landauer_bound_bits);
    let _ = writeln!(text, "deficit        {} bit-units", r.deficit_bits);
    if let (Some(e), Some(l)) = (r.energy_joules, r.landauer_joules) {
        let _ = writeln!(text, "energy         {e:e} J (bound {l:e} J)");
    }
    let mut v = to_value(&r);
    v["readback"] = json!(readback);
    Ok((v, text))
}
