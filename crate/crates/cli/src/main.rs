//! `sitecalc`: command-line driver over `.fincat` documents and builtin
//! categories.
//!
//! Exit status is 0 when the analysed property holds and 1 when a
//! counterexample is printed. Any error exits with 2.
//!
//! With `--format structured` every output line is a record of
//! space-separated `key=value` pairs whose first pair is `record=<kind>`.
//! Values never contain spaces: lists are comma-joined and any space, `=`,
//! `%` or comma inside a single value is percent-encoded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sitecalc::epi::classify;
use sitecalc::limits::{find_binary_coproduct, find_initial, kernel_pair};
use sitecalc::sheaf::{is_sheaf_for_topology, preserves_finite_products, sheaf_census, Budget};
use sitecalc::sieve::enumerate_sieves;
use sitecalc::topology::{
    coherent_coverage, extensive_coverage, generated_by_union, is_finitary_extensive,
    is_precoherent, is_preregular, regular_coverage, saturate, Verdict,
};
use sitecalc::transport::{check_equivalence_conditions, verify_sheaf_equivalence};
use sitecalc::workbench::check_paper::{run_suites, suites, Status};
use sitecalc::workbench::doc::{emit_document, parse_document_with_caps, parse_functor, CategoryDoc};
use sitecalc::workbench::generators::builtin;
use sitecalc::{validate_category, Caps, Error, FinCat, GrothTopology, MorId, Sieve};

#[derive(Parser)]
#[command(name = "sitecalc", version, about = "Finite sites, topologies and sheaves")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Largest number of non-identity morphisms into one object for which
    /// sieves are enumerated.
    #[arg(long, global = true)]
    sieve_cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct Input {
    /// Path to a `.fincat` document, or `builtin:SPEC` (skeleton:N, fintop:N,
    /// finset-full, walking-arrow, chain:N, cyclic:N).
    category: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check the category laws.
    Validate(Input),
    /// Print the category back as a canonical document.
    Emit(Input),
    /// Classify every morphism as epi, regular epi and effective epi.
    Epis(Input),
    /// Initial object, binary coproducts and kernel pairs.
    Limits(Input),
    /// Preregular, finitary extensive and precoherent.
    Predicates(Input),
    /// Covering sieves of the topology generated by a coverage.
    Topology {
        #[arg(long)]
        coverage: String,
        #[command(flatten)]
        input: Input,
    },
    /// All sieves on every object.
    Sieves(Input),
    /// Decide the sheaf condition for a presheaf declared in the document.
    Sheaf {
        #[arg(long)]
        presheaf: String,
        #[arg(long, default_value = "coherent")]
        topology: String,
        #[command(flatten)]
        input: Input,
    },
    /// Count sheaves up to isomorphism with bounded carriers.
    Census {
        #[arg(long)]
        max_carrier: usize,
        #[arg(long, default_value = "coherent")]
        topology: String,
        #[command(flatten)]
        input: Input,
    },
    /// Check the comparison conditions for a functor into a coherent site.
    Transport {
        /// Functor document (`functor F : A -> B`).
        #[arg(long)]
        functor: PathBuf,
        /// Also compare sheaf censuses with this carrier bound.
        #[arg(long)]
        max_carrier: Option<usize>,
        source: String,
        target: String,
    },
    /// Run the property suites applicable to the category.
    CheckPaper {
        #[arg(long, conflicts_with = "prop")]
        all: bool,
        /// Suite id; repeatable.
        #[arg(long)]
        prop: Vec<String>,
        /// Worker threads for the suites.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// List suite ids and exit.
        #[arg(long)]
        list: bool,
        #[arg(required_unless_present = "list")]
        category: Option<String>,
    },
}

struct Out {
    format: Format,
    lines: Vec<String>,
}

fn encode(v: &str) -> String {
    let mut s = String::with_capacity(v.len());
    for ch in v.chars() {
        match ch {
            ' ' => s.push_str("%20"),
            '=' => s.push_str("%3D"),
            '%' => s.push_str("%25"),
            ',' => s.push_str("%2C"),
            '\n' => s.push_str("%0A"),
            c => s.push(c),
        }
    }
    if s.is_empty() {
        s.push('-');
    }
    s
}

fn list(items: impl IntoIterator<Item = impl AsRef<str>>) -> String {
    let v: Vec<String> = items.into_iter().map(|s| encode(s.as_ref())).collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join(",")
    }
}

impl Out {
    /// Buffers one report line. `fields` must already be encoded.
    fn rec(&mut self, kind: &str, fields: &[(&str, String)], text: impl FnOnce() -> String) {
        match self.format {
            Format::Text => self.lines.push(text()),
            Format::Structured => {
                let mut line = format!("record={kind}");
                for (k, v) in fields {
                    line.push(' ');
                    line.push_str(k);
                    line.push('=');
                    line.push_str(v);
                }
                self.lines.push(line);
            }
        }
    }

    fn flush(&mut self) {
        for l in self.lines.drain(..) {
            println!("{l}");
        }
    }
}

fn yn(b: bool) -> String {
    b.to_string()
}

fn load(spec: &str, caps: &Caps) -> Result<CategoryDoc, Error> {
    if let Some(rest) = spec.strip_prefix("builtin:") {
        let c = Arc::new(builtin(rest)?);
        return Ok(CategoryDoc {
            category: c,
            presheaves: Vec::new(),
            coverages: Vec::new(),
        });
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| Error::PreconditionFailed(format!("cannot read {spec}: {e}")))?;
    parse_document_with_caps(&text, caps)
}

fn sieve_text(c: &FinCat, s: &Sieve) -> String {
    format!("{{{}}}", s.iter().map(|f| c.morphism_name(f)).collect::<Vec<_>>().join(" "))
}

fn sieve_list(c: &FinCat, s: &Sieve) -> String {
    list(s.iter().map(|f| c.morphism_name(f).to_string()))
}

fn topology_for(doc: &CategoryDoc, choice: &str, caps: &Caps) -> Result<GrothTopology, Error> {
    let c = &doc.category;
    match choice {
        "regular" => saturate(&regular_coverage(c)?, caps),
        "extensive" => saturate(&extensive_coverage(c)?, caps),
        "coherent" => saturate(&coherent_coverage(c, caps)?, caps),
        "union" => generated_by_union(&regular_coverage(c)?, &extensive_coverage(c)?, caps),
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                let (path, name) = match path.split_once('#') {
                    Some((p, n)) => (p, Some(n)),
                    None => (path, None),
                };
                let text = fs::read_to_string(Path::new(path))
                    .map_err(|e| Error::PreconditionFailed(format!("cannot read {path}: {e}")))?;
                let cov_doc = parse_document_with_caps(&text, caps)?;
                if *cov_doc.category != **c {
                    return Err(Error::TypeMismatch(format!(
                        "{path} declares a different category"
                    )));
                }
                let cov = match name {
                    Some(n) => cov_doc.coverage(n).cloned(),
                    None => cov_doc.coverages.first().map(|(_, k)| k.clone()),
                }
                .ok_or_else(|| Error::PreconditionFailed(format!("{path} has no such coverage")))?;
                // Rebase onto the category instance of the main document.
                let mut rebased = sitecalc::Coverage::empty(c.clone());
                for x in c.objects() {
                    for p in cov.covering(x) {
                        rebased.insert(p.clone());
                    }
                }
                saturate(&rebased, caps)
            } else if let Some(cov) = doc.coverage(other) {
                saturate(cov, caps)
            } else {
                Err(Error::PreconditionFailed(format!(
                    "unknown topology {other:?}; expected regular, extensive, coherent, union, file:PATH or a coverage name"
                )))
            }
        }
    }
}

fn verdict_rec(out: &mut Out, c: &FinCat, name: &str, v: &Verdict) {
    let detail = match v {
        Verdict::Holds => String::new(),
        Verdict::Fails(cx) => cx.describe(c),
    };
    out.rec(
        "predicate",
        &[("name", name.into()), ("holds", yn(v.holds())), ("counterexample", encode(&detail))],
        || match v {
            Verdict::Holds => format!("{name}: yes"),
            Verdict::Fails(_) => format!("{name}: no ({detail})"),
        },
    );
}

fn run(cli: Cli, out: &mut Out) -> Result<bool, Error> {
    let mut caps = Caps::default();
    if let Some(k) = cli.sieve_cap {
        caps.max_sieve_morphisms = k;
    }
    let budget = Budget::from_env();
    match cli.command {
        Command::Validate(input) => {
            let doc = load(&input.category, &caps)?;
            let c = &doc.category;
            let report = validate_category(c);
            for v in &report.violations {
                out.rec("violation", &[("detail", encode(&v.to_string()))], || v.to_string());
            }
            out.rec(
                "summary",
                &[
                    ("category", encode(c.name())),
                    ("objects", c.object_count().to_string()),
                    ("morphisms", c.morphism_count().to_string()),
                    ("valid", yn(report.is_ok())),
                ],
                || {
                    format!(
                        "{}: {} objects, {} morphisms, {}",
                        c.name(),
                        c.object_count(),
                        c.morphism_count(),
                        if report.is_ok() { "valid" } else { "invalid" }
                    )
                },
            );
            Ok(report.is_ok())
        }
        Command::Emit(input) => {
            let doc = load(&input.category, &caps)?;
            print!("{}", emit_document(&doc));
            Ok(true)
        }
        Command::Epis(input) => {
            let doc = load(&input.category, &caps)?;
            let c = &doc.category;
            for f in c.morphisms() {
                let k = classify(c, f);
                let (d, e) = (c.object_name(c.dom(f)), c.object_name(c.cod(f)));
                out.rec(
                    "epi",
                    &[
                        ("morphism", encode(c.morphism_name(f))),
                        ("dom", encode(d)),
                        ("cod", encode(e)),
                        ("epi", yn(k.is_epi)),
                        ("regular", yn(k.is_regular_epi)),
                        ("effective", yn(k.is_effective_epi)),
                        ("kernel_pair", yn(k.has_kernel_pair())),
                    ],
                    || {
                        let mut tags = Vec::new();
                        if k.is_epi {
                            tags.push("epi");
                        }
                        if k.is_regular_epi {
                            tags.push("regular");
                        }
                        if k.is_effective_epi {
                            tags.push("effective");
                        }
                        if k.has_kernel_pair() {
                            tags.push("kernel-pair");
                        }
                        let tags = if tags.is_empty() { "-".to_string() } else { tags.join(" ") };
                        format!("{} : {d} -> {e}  {tags}", c.morphism_name(f))
                    },
                );
            }
            Ok(true)
        }
        Command::Limits(input) => {
            let doc = load(&input.category, &caps)?;
            let c = &doc.category;
            let init = find_initial(c);
            let name = init.map(|x| c.object_name(x).to_string()).unwrap_or_default();
            out.rec("initial", &[("object", encode(&name))], || match init {
                Some(_) => format!("initial: {name}"),
                None => "initial: none".into(),
            });
            for x in c.objects() {
                for y in c.objects().filter(|&y| y >= x) {
                    let w = find_binary_coproduct(c, x, y);
                    let (xn, yn_) = (c.object_name(x), c.object_name(y));
                    let apex = w.as_ref().map(|w| c.object_name(w.apex).to_string()).unwrap_or_default();
                    let legs: Vec<String> = w
                        .as_ref()
                        .map(|w| w.legs.iter().map(|&l| c.morphism_name(l).to_string()).collect())
                        .unwrap_or_default();
                    out.rec(
                        "coproduct",
                        &[("left", encode(xn)), ("right", encode(yn_)), ("apex", encode(&apex)), ("legs", list(&legs))],
                        || match &w {
                            Some(_) => format!("coproduct {xn} + {yn_} = {apex} via {}", legs.join(" ")),
                            None => format!("coproduct {xn} + {yn_}: none"),
                        },
                    );
                }
            }
            for f in c.morphisms() {
                let w = kernel_pair(c, f);
                let fname = c.morphism_name(f);
                let apex = w.as_ref().map(|w| c.object_name(w.apex).to_string()).unwrap_or_default();
                let legs: Vec<String> = w
                    .as_ref()
                    .map(|w| w.legs.iter().map(|&l: &MorId| c.morphism_name(l).to_string()).collect())
                    .unwrap_or_default();
                out.rec(
                    "kernel_pair",
                    &[("morphism", encode(fname)), ("apex", encode(&apex)), ("legs", list(&legs))],
                    || match &w {
                        Some(_) => format!("kernel pair of {fname}: {apex} via {}", legs.join(" ")),
                        None => format!("kernel pair of {fname}: none"),
                    },
                );
            }
            Ok(true)
        }
        Command::Predicates(input) => {
            let doc = load(&input.category, &caps)?;
            let c = &doc.category;
            let pre = is_preregular(c);
            let ext = is_finitary_extensive(c);
            let coh = is_precoherent(c, &caps)?;
            verdict_rec(out, c, "preregular", &pre);
            verdict_rec(out, c, "finitary-extensive", &ext);
            verdict_rec(out, c, "precoherent", &coh);
            Ok(pre.holds() && ext.holds() && coh.holds())
        }
        Command::Topology { coverage, input } => {
            let doc = load(&input.category, &caps)?;
            let c = &doc.category;
            let t = topology_for(&doc, &coverage, &caps)?;
            for x in c.objects() {
                let xn = c.object_name(x);
                for s in t.covering(x) {
                    out.rec(
                        "covering",
                        &[("object", encode(xn)), ("sieve", sieve_list(c, s))],
                        || format!("{xn}: {}", sieve_text(c, s)),
                    );
                }
            }
            Ok(true)
        }
        Command::Sieves(input) => {
            let doc = load(&input.category, &caps)?;
            let c = &doc.category;
            for x in c.objects() {
                let xn = c.object_name(x);
                for s in enumerate_sieves(c, x, &caps)? {
                    out.rec(
                        "sieve",
                        &[("object", encode(xn)), ("sieve", sieve_list(c, &s))],
                        || format!("{xn}: {}", sieve_text(c, &s)),
                    );
                }
            }
            Ok(true)
        }
        Command::Sheaf { presheaf, topology, input } => {
            let doc = load(&input.category, &caps)?;
            let p = doc
                .presheaf(&presheaf)
                .ok_or_else(|| Error::PreconditionFailed(format!("no presheaf named {presheaf:?}")))?;
            let t = topology_for(&doc, &topology, &caps)?;
            let sheaf = is_sheaf_for_topology(p, &t, budget)?;
            let products = preserves_finite_products(p).ok();
            let products_s = products.map(yn).unwrap_or_else(|| "n/a".into());
            out.rec(
                "sheaf",
                &[
                    ("presheaf", encode(&presheaf)),
                    ("topology", encode(&topology)),
                    ("sheaf", yn(sheaf)),
                    ("preserves_products", products_s.clone()),
                ],
                || {
                    format!(
                        "{presheaf} is {}a sheaf for {topology} (finite products preserved: {products_s})",
                        if sheaf { "" } else { "not " }
                    )
                },
            );
            Ok(sheaf)
        }
        Command::Census { max_carrier, topology, input } => {
            let doc = load(&input.category, &caps)?;
            let c = &doc.category;
            let t = topology_for(&doc, &topology, &caps)?;
            let classes = sheaf_census(c, &t, max_carrier, budget)?;
            for p in &classes {
                let carriers: Vec<String> = p.carriers().iter().map(|k| k.to_string()).collect();
                out.rec("class", &[("carriers", list(&carriers))], || {
                    format!("sheaf with carriers [{}]", carriers.join(" "))
                });
            }
            out.rec(
                "census",
                &[
                    ("topology", encode(&topology)),
                    ("max_carrier", max_carrier.to_string()),
                    ("classes", classes.len().to_string()),
                ],
                || format!("{} sheaf classes for {topology} with carriers <= {max_carrier}", classes.len()),
            );
            Ok(true)
        }
        Command::Transport { functor, max_carrier, source, target } => {
            let s = load(&source, &caps)?.category;
            let t = load(&target, &caps)?.category;
            let text = fs::read_to_string(&functor).map_err(|e| {
                Error::PreconditionFailed(format!("cannot read {}: {e}", functor.display()))
            })?;
            let f = parse_functor(&text, &s, &t)?;
            let cond = check_equivalence_conditions(&f, &caps)?;
            let np = cond
                .not_preserved_or_reflected
                .as_ref()
                .map(|p| {
                    format!(
                        "{}:{{{}}}",
                        s.object_name(p.target()),
                        p.iter().map(|m| s.morphism_name(m)).collect::<Vec<_>>().join(" ")
                    )
                })
                .unwrap_or_default();
            let nc = cond.not_covered.map(|y| t.object_name(y).to_string()).unwrap_or_default();
            let rows: [(&str, bool, String); 5] = [
                ("fully-faithful", cond.fully_faithful, String::new()),
                (
                    "target-precoherent",
                    cond.target_precoherent.holds(),
                    match &cond.target_precoherent {
                        Verdict::Fails(cx) => cx.describe(&t),
                        Verdict::Holds => String::new(),
                    },
                ),
                ("families-preserved-and-reflected", cond.not_preserved_or_reflected.is_none(), np),
                ("image-covers", cond.not_covered.is_none(), nc),
                (
                    "source-precoherent",
                    cond.source_precoherent.holds(),
                    match &cond.source_precoherent {
                        Verdict::Fails(cx) => cx.describe(&s),
                        Verdict::Holds => String::new(),
                    },
                ),
            ];
            for (name, ok, detail) in &rows {
                out.rec(
                    "condition",
                    &[("name", (*name).into()), ("holds", yn(*ok)), ("counterexample", encode(detail))],
                    || {
                        if *ok {
                            format!("{name}: yes")
                        } else {
                            format!("{name}: no ({detail})")
                        }
                    },
                );
            }
            let mut ok = cond.passes();
            if let (true, Some(k)) = (ok, max_carrier) {
                let census = verify_sheaf_equivalence(&f, k, &caps, budget)?;
                out.rec(
                    "equivalence",
                    &[
                        ("max_carrier", k.to_string()),
                        ("source_classes", census.source_census.len().to_string()),
                        ("target_classes", census.target_census.len().to_string()),
                        ("source_topology_is_coherent", yn(census.source_topology_is_coherent)),
                        ("bijection", yn(census.is_bijection())),
                    ],
                    || {
                        format!(
                            "sheaf classes with carriers <= {k}: source {}, target {}, bijection {}",
                            census.source_census.len(),
                            census.target_census.len(),
                            if census.is_bijection() { "yes" } else { "no" }
                        )
                    },
                );
                ok &= census.is_bijection();
            }
            Ok(ok)
        }
        Command::CheckPaper { all, prop, jobs, list: only_list, category } => {
            if only_list {
                for s in suites() {
                    out.rec("suite", &[("id", s.id.into()), ("summary", encode(s.summary))], || {
                        format!("{}  {}", s.id, s.summary)
                    });
                }
                return Ok(true);
            }
            let category = category.expect("required by clap");
            let doc = load(&category, &caps)?;
            let ids = if all || prop.is_empty() { None } else { Some(prop.as_slice()) };
            let results = run_suites(&doc.category, ids, jobs, &caps, budget)?;
            let mut ok = true;
            for r in &results {
                ok &= r.status != Status::Fail;
                out.rec(
                    "suite",
                    &[("id", r.id.into()), ("status", r.status.to_string()), ("detail", encode(&r.detail))],
                    || r.to_string(),
                );
            }
            let count = |s: Status| results.iter().filter(|r| r.status == s).count();
            let (p, f, k) = (count(Status::Pass), count(Status::Fail), count(Status::Skip));
            out.rec(
                "summary",
                &[("pass", p.to_string()), ("fail", f.to_string()), ("skip", k.to_string())],
                || format!("{p} passed, {f} failed, {k} skipped"),
            );
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out {
        format: cli.format,
        lines: Vec::new(),
    };
    let result = run(cli, &mut out);
    out.flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
