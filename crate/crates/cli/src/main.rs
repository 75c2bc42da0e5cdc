//! `exptree` command-line front end.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 when input data or
//! configuration is invalid.

mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use exptree::ccg::{score_candidates, train_parser, Lexicon, ParserModel};
use exptree::exec::{ExactMatcher, SoftConfig, StringMatcher};
use exptree::io::{self as eio, GoldRecord, LabelRecord, SyntheticSpec};
use exptree::logic::{sexpr, LabelSet, LogicalForm};
use exptree::matcher::{class_sets, pretrain, Checkpoint, EmbeddingTable, MatcherModel, PretrainConfig};
use exptree::pipeline::{
    accuracy, form_queries, normalize_scores, partition_corpus, pseudo_label, soft_match, train_joint, Classifier,
    JointData, LogisticRegression,
};

use config::{ModelCheckpoint, TrainFile};

#[derive(Debug, Parser)]
#[command(name = "exptree", version, about = "Labeling functions from natural-language explanations")]
struct Cli {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Parse explanations into logical forms.
    Parse(ParseArgs),
    /// Split a corpus by exact matching against forms.
    Partition(PartitionArgs),
    /// Soft-match every form against every sentence (TSV).
    Match(MatchArgs),
    /// Pretrain the string matcher.
    Pretrain(PretrainArgs),
    /// Run joint training from a config file.
    Train(TrainArgs),
    /// Pseudo-label a corpus (JSONL).
    Label(LabelArgs),
    /// Score predictions against gold labels.
    Eval(EvalArgs),
    /// Write a synthetic paraphrase corpus.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct ParseArgs {
    /// A single explanation; prints every candidate with its probability.
    #[arg(long, conflicts_with = "explanations")]
    text: Option<String>,
    /// Explanations JSONL; trains the ranker on them and prints forms JSONL.
    #[arg(long, required_unless_present = "text")]
    explanations: Option<PathBuf>,
    /// Corpus JSONL used to resolve `source_id`.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Lexicon TSV replacing the built-in one.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PartitionArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    forms: PathBuf,
    /// Write strict-matched instances with their labels here (JSONL).
    #[arg(long)]
    labeled: Option<PathBuf>,
    /// Write the remaining instances here (corpus JSONL).
    #[arg(long)]
    unlabeled: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MatcherArgs {
    /// Word vectors; without them matching is exact.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Matcher checkpoint from `pretrain`.
    #[arg(long, requires = "embeddings")]
    matcher: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    max_window: usize,
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    #[arg(long, default_value_t = 2)]
    slack: usize,
}

#[derive(Debug, Args)]
struct MatchArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    forms: PathBuf,
    #[command(flatten)]
    m: MatcherArgs,
}

#[derive(Debug, Args)]
struct PretrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    embeddings: PathBuf,
    /// Query JSONL; defaults to the query phrases of `--forms`.
    #[arg(long, required_unless_present = "forms")]
    queries: Option<PathBuf>,
    #[arg(long)]
    forms: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    max_window: usize,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 100)]
    batch_size: usize,
    #[arg(long, default_value_t = 2.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.8)]
    tau: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    config: PathBuf,
    /// Directory for the outputs named in the config.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LabelArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    forms: PathBuf,
    #[command(flatten)]
    m: MatcherArgs,
    /// Trained model from `train`; enables the None-label gate.
    #[arg(long, requires = "embeddings", conflicts_with = "matcher")]
    model: Option<PathBuf>,
    #[arg(long)]
    entropy_threshold: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    theta_t: f64,
    #[arg(long, default_value = "no_relation")]
    none_label: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Predictions JSONL of `{id, label}`.
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, default_value = "no_relation")]
    none_label: String,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// TOML file with generator settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    forms: Option<usize>,
    #[arg(long)]
    test_size: Option<usize>,
    #[arg(long)]
    out_dir: PathBuf,
}

/// Everything that makes a command fail after its arguments parsed.
#[derive(Debug)]
struct DataError(String);

impl<E: std::fmt::Display> From<E> for DataError {
    fn from(e: E) -> Self {
        DataError(e.to_string())
    }
}

type CmdResult = Result<(), DataError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let seed = cli.seed;
    let r = match cli.cmd {
        Cmd::Parse(a) => cmd_parse(a),
        Cmd::Partition(a) => cmd_partition(a),
        Cmd::Match(a) => cmd_match(a),
        Cmd::Pretrain(a) => cmd_pretrain(a, seed),
        Cmd::Train(a) => cmd_train(a, seed),
        Cmd::Label(a) => cmd_label(a),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Gen(a) => cmd_gen(a, seed),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(DataError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, DataError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| format!("{}: {e}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_embeddings(path: &Path) -> Result<Arc<EmbeddingTable>, DataError> {
    let f = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(Arc::new(EmbeddingTable::read_text(BufReader::new(f), &path.display().to_string())?))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, DataError> {
    let s = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&s).map_err(|e| DataError(format!("{}: {e}", path.display())))
}

fn soft_config(m: &MatcherArgs) -> Result<SoftConfig, DataError> {
    let cfg = SoftConfig { mu: m.mu, slack_width: m.slack };
    cfg.validate()?;
    Ok(cfg)
}

fn build_matcher(m: &MatcherArgs) -> Result<Box<dyn StringMatcher>, DataError> {
    let Some(e) = &m.embeddings else {
        return Ok(Box::new(ExactMatcher));
    };
    let emb = load_embeddings(e)?;
    Ok(Box::new(match &m.matcher {
        Some(p) => MatcherModel::from_checkpoint(emb, &read_json::<Checkpoint>(p)?)?,
        None => MatcherModel::new(emb, m.max_window),
    }))
}

/// Form labels in first-seen order, then the none label if absent.
fn label_set(forms: &[LogicalForm], none_label: &str) -> Result<LabelSet, DataError> {
    let mut labels: Vec<String> = Vec::new();
    for f in forms {
        if !labels.iter().any(|l| l == f.label()) {
            labels.push(f.label().to_string());
        }
    }
    if !labels.iter().any(|l| l == none_label) {
        labels.push(none_label.to_string());
    }
    Ok(LabelSet::new(labels, none_label)?)
}

fn cmd_parse(a: ParseArgs) -> CmdResult {
    let lexicon = match &a.lexicon {
        Some(p) => Lexicon::parse(&fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?)?,
        None => Lexicon::default(),
    };
    let model = ParserModel::new(Arc::new(lexicon));
    let mut out = output(&a.out)?;
    if let Some(text) = &a.text {
        let cands = model.parse(text)?;
        let p = score_candidates(&model.theta, &cands);
        for (c, p) in cands.iter().zip(p) {
            writeln!(out, "{p:.6}\t{}", c.sexpr)?;
        }
        out.flush()?;
        return Ok(());
    }
    let path = a.explanations.as_ref().expect("clap enforces one of text/explanations");
    let corpus = match &a.corpus {
        Some(c) => eio::load_corpus(c)?,
        None => Vec::new(),
    };
    let items = eio::load_explanations(path, &corpus)?;
    let (trained, report) = train_parser(&model, &items, a.epochs, a.lr)?;
    for s in &report.skipped {
        eprintln!("skipped {}: {}", s.id, s.reason);
    }
    let mut forms = Vec::new();
    for it in &items {
        match trained.compile(&it.id, &it.text, &it.label) {
            Ok(f) => forms.push(eio::FormRecord::from_form(&f)),
            Err(e) => eprintln!("no form for {}: {e}", it.id),
        }
    }
    eio::write_jsonl_to(out, &forms)?;
    Ok(())
}

fn cmd_partition(a: PartitionArgs) -> CmdResult {
    let corpus = eio::load_corpus(&a.corpus)?;
    let forms = eio::load_forms(&a.forms)?;
    let p = partition_corpus(&corpus, &forms)?;
    if let Some(path) = &a.labeled {
        let recs: Vec<GoldRecord> =
            p.labeled.iter().map(|l| GoldRecord { id: l.instance.id.clone(), label: l.label.clone() }).collect();
        eio::write_jsonl(path, &recs)?;
    }
    if let Some(path) = &a.unlabeled {
        eio::save_corpus(path, &p.unlabeled)?;
    }
    println!("N_a={} N_u={} conflicts={}", p.n_labeled(), p.n_unlabeled(), p.conflicts);
    Ok(())
}

fn cmd_match(a: MatchArgs) -> CmdResult {
    let corpus = eio::load_corpus(&a.corpus)?;
    let forms = eio::load_forms(&a.forms)?;
    let cfg = soft_config(&a.m)?;
    let matcher = build_matcher(&a.m)?;
    let mut out = output(&None)?;
    writeln!(out, "instance_id\tform_id\tscore")?;
    for x in &corpus {
        for f in &forms {
            writeln!(out, "{}\t{}\t{}", x.id, f.id, soft_match(f, x, matcher.as_ref(), &cfg)?)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_pretrain(a: PretrainArgs, seed: Option<u64>) -> CmdResult {
    let corpus = eio::load_corpus(&a.corpus)?;
    let emb = load_embeddings(&a.embeddings)?;
    let queries = match (&a.queries, &a.forms) {
        (Some(q), _) => eio::load_queries(q)?,
        (None, Some(f)) => form_queries(&eio::load_forms(f)?),
        (None, None) => unreachable!("clap requires queries or forms"),
    };
    let cfg = PretrainConfig {
        epochs: a.epochs,
        lr: a.lr,
        batch_size: a.batch_size,
        gamma: a.gamma,
        tau: a.tau,
        seed: seed.unwrap_or(0),
    };
    let mut model = MatcherModel::new(emb, a.max_window);
    let report = pretrain(&mut model, &corpus, &class_sets(&queries), &cfg)?;
    for (i, l) in report.epoch_losses.iter().enumerate() {
        eprintln!("epoch {}\tL_string {l:.6}", i + 1);
    }
    fs::write(&a.out, serde_json::to_string_pretty(&model.to_checkpoint())?)?;
    Ok(())
}

fn cmd_train(a: TrainArgs, seed: Option<u64>) -> CmdResult {
    let tf = TrainFile::load(&a.config)?;
    let mut train_cfg = tf.train.clone();
    let mut pre_cfg = tf.pretrain;
    if let Some(s) = seed {
        train_cfg.seed = s;
        pre_cfg.seed = s;
    }
    let base = a.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let out_base = a.out_dir.clone().unwrap_or_else(|| base.clone());
    let data = &tf.data;
    let corpus = eio::load_corpus(&base.join(&data.corpus))?;
    let forms = eio::load_forms(&base.join(&data.forms))?;
    let emb = load_embeddings(&base.join(&data.embeddings))?;
    let labels = match &data.labels {
        Some(l) => LabelSet::new(l.clone(), &data.none_label)?,
        None => label_set(&forms, &data.none_label)?,
    };
    let queries = match &data.queries {
        Some(q) => eio::load_queries(&base.join(q))?,
        None => form_queries(&forms),
    };
    let sims = class_sets(&queries);
    let dev = match (&data.dev_corpus, &data.dev_gold) {
        (Some(c), Some(g)) => {
            let xs = eio::load_corpus(&base.join(c))?;
            let gold = eio::load_gold(&base.join(g))?;
            xs.into_iter()
                .map(|x| {
                    let l = gold.get(&x.id).ok_or_else(|| format!("no gold label for dev instance {}", x.id))?;
                    let y = labels.index(l).ok_or_else(|| format!("dev label {l} is not in the label set"))?;
                    Ok((x, y))
                })
                .collect::<Result<Vec<_>, DataError>>()?
        }
        (None, None) => Vec::new(),
        _ => return Err(DataError("dev_corpus and dev_gold must be given together".into())),
    };

    let matcher = match &tf.matcher.checkpoint {
        Some(p) => MatcherModel::from_checkpoint(emb.clone(), &read_json::<Checkpoint>(&base.join(p))?)?,
        None => {
            let mut m = MatcherModel::new(emb.clone(), tf.matcher.max_window);
            pretrain(&mut m, &corpus, &sims, &pre_cfg)?;
            m
        }
    };
    let partition = partition_corpus(&corpus, &forms)?;
    eprintln!("N_a={} N_u={} conflicts={}", partition.n_labeled(), partition.n_unlabeled(), partition.conflicts);
    let jd = JointData { partition: &partition, forms: &forms, labels: &labels, sims: &sims, dev: &dev };
    let clf = LogisticRegression::new(emb.clone(), labels.len());
    let outcome = train_joint(&jd, matcher, clf, &train_cfg)?;

    fs::create_dir_all(&out_base)?;
    let ck = ModelCheckpoint::new(&labels, &outcome.classifier, &outcome.matcher);
    fs::write(out_base.join(&tf.output.checkpoint), serde_json::to_string(&ck)?)?;
    let metrics = BufWriter::new(File::create(out_base.join(&tf.output.metrics))?);
    eio::write_metrics_csv(metrics, &outcome.metrics)?;
    if !dev.is_empty() {
        let preds: Vec<GoldRecord> = dev
            .iter()
            .map(|(x, _)| GoldRecord {
                id: x.id.clone(),
                label: labels.name(outcome.classifier.predict(x)).to_string(),
            })
            .collect();
        eio::write_jsonl(&out_base.join(&tf.output.predictions), &preds)?;
        println!("dev_acc={}", accuracy(&outcome.classifier, &dev));
    }
    Ok(())
}

fn cmd_label(a: LabelArgs) -> CmdResult {
    let corpus = eio::load_corpus(&a.corpus)?;
    let forms = eio::load_forms(&a.forms)?;
    if forms.is_empty() {
        return Err(DataError("no forms to label with".into()));
    }
    let cfg = soft_config(&a.m)?;
    let (matcher, labels, clf): (Box<dyn StringMatcher>, LabelSet, Option<LogisticRegression>) = match &a.model {
        Some(p) => {
            let ck: ModelCheckpoint = read_json(p)?;
            let emb = load_embeddings(a.m.embeddings.as_ref().expect("clap requires embeddings"))?;
            let (labels, clf, m) = ck.restore(emb)?;
            (Box::new(m), labels, Some(clf))
        }
        None => (build_matcher(&a.m)?, label_set(&forms, &a.none_label)?, None),
    };
    let threshold = match (&clf, a.entropy_threshold) {
        (_, Some(t)) => t,
        (Some(_), None) => exptree::pipeline::TrainConfig::default().threshold_for(labels.len()),
        (None, None) => 0.0,
    };
    let clf_ref = clf.as_ref().map(|c| c as &dyn Classifier);
    let pl = corpus
        .iter()
        .map(|x| pseudo_label(x, &forms, &labels, matcher.as_ref(), clf_ref, &cfg, threshold))
        .collect::<Result<Vec<_>, _>>()?;
    let u: Vec<f64> = pl.iter().map(|p| p.u).collect();
    let omega = if u.is_empty() { Vec::new() } else { normalize_scores(&u, a.theta_t) };
    let recs: Vec<LabelRecord> = corpus
        .iter()
        .zip(&pl)
        .zip(&omega)
        .map(|((x, p), &w)| LabelRecord {
            instance_id: x.id.clone(),
            label: labels.name(p.label).to_string(),
            u: p.u,
            omega: w,
        })
        .collect();
    eio::write_jsonl_to(output(&a.out)?, &recs)?;
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> CmdResult {
    let pred = eio::load_gold(&a.pred)?;
    let gold = eio::load_gold(&a.gold)?;
    let ev = eio::evaluate(&pred, &gold, &a.none_label)?;
    println!("precision\t{:.4}", ev.micro.precision);
    println!("recall\t{:.4}", ev.micro.recall);
    println!("f1\t{:.4}", ev.micro.f1);
    println!("accuracy\t{:.4}", ev.accuracy);
    for (c, s) in &ev.per_class {
        println!("{c}\tP={:.4}\tR={:.4}\tF1={:.4}", s.precision, s.recall, s.f1);
    }
    Ok(())
}

fn cmd_gen(a: GenArgs, seed: Option<u64>) -> CmdResult {
    let mut spec: SyntheticSpec = match &a.config {
        Some(p) => toml::from_str(&fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?)?,
        None => SyntheticSpec::default(),
    };
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.size = a.size.unwrap_or(spec.size);
    spec.paraphrase_rate = a.rate.unwrap_or(spec.paraphrase_rate);
    spec.num_forms = a.forms.unwrap_or(spec.num_forms);
    spec.test_size = a.test_size.unwrap_or(spec.test_size);
    let d = eio::generate_synthetic(&spec)?;
    let dir = &a.out_dir;
    fs::create_dir_all(dir)?;
    eio::save_corpus(&dir.join("corpus.jsonl"), &d.corpus)?;
    eio::write_jsonl(&dir.join("gold.jsonl"), &d.gold)?;
    eio::save_forms(&dir.join("forms.jsonl"), &d.forms)?;
    eio::write_jsonl(&dir.join("queries.jsonl"), &d.queries)?;
    eio::write_jsonl(&dir.join("explanations.jsonl"), &d.explanations)?;
    d.embeddings.write_text(BufWriter::new(File::create(dir.join("embeddings.txt"))?))?;
    if !d.test.is_empty() {
        eio::save_corpus(&dir.join("test.jsonl"), &d.test)?;
        eio::write_jsonl(&dir.join("test_gold.jsonl"), &d.test_gold)?;
    }
    let classes: BTreeSet<&str> = d.gold.iter().map(|g| g.label.as_str()).collect();
    let per: BTreeMap<&str, usize> = d.forms.iter().fold(BTreeMap::new(), |mut m, f| {
        *m.entry(f.label()).or_default() += 1;
        m
    });
    eprintln!(
        "wrote {} instances ({} paraphrased), {} forms over {} classes {:?}; first form {}",
        d.corpus.len(),
        d.paraphrased.len(),
        d.forms.len(),
        classes.len(),
        per,
        d.forms.first().map(|f| sexpr::print(f.root())).unwrap_or_default()
    );
    Ok(())
}
