use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use lexatlas::ingest::{load_ingest, save_ingest};
use lexatlas::xlink::link_word;
use lexatlas::{
    build_atlas, build_context_graph, enumerate_cliques, ingest, load_atlas, load_dictionary, save_atlas,
    sense_cliques, AtlasConfig, CliquePolicy, IngestConfig, LexicalUnit, LinkParams, TableIndex, Targets,
};
use lexatlas_server::ServiceConfig;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "atlas", version, about = "Build and serve lexico-semantic atlases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse CoNLL-U files into a dependency table and sentence store.
    Ingest {
        #[arg(long)]
        lang: String,
        /// TOML ingest settings; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the sense cliques of one target as JSON.
    Cliques {
        /// Ingest directory to read.
        #[arg(long = "in")]
        input: PathBuf,
        /// Target as `lemma#POS`.
        #[arg(long)]
        target: String,
        #[arg(long)]
        primary_only: bool,
        #[arg(long)]
        min_freq: Option<u64>,
    },
    /// Build an atlas from an ingest directory.
    Build {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// One `lemma#POS` or bare lemma per line; all units when omitted.
        #[arg(long)]
        targets: Option<PathBuf>,
        /// TOML atlas settings.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print cross-language sense links for one word as JSON.
    Link {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        tgt: PathBuf,
        /// Tab-separated `source<TAB>target` lines.
        #[arg(long)]
        dict: PathBuf,
        /// `lemma#POS` or a bare lemma.
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, default_value_t = 3)]
        min_overlap: usize,
    },
    /// Serve the HTTP API described by a TOML file.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { lang, config, out, files } => {
            let cfg = match config {
                Some(p) => IngestConfig::from_toml(&read(&p)?)?,
                None => IngestConfig::default(),
            };
            let result = ingest(&files, &lang, &cfg)?;
            save_ingest(&result, &out)?;
            print_json(&result.stats)
        }
        Command::Cliques { input, target, primary_only, min_freq } => {
            let data = load_ingest(&input).with_context(|| format!("reading {}", input.display()))?;
            let target: LexicalUnit = target.parse()?;
            let mut cfg = AtlasConfig::default().graph;
            if let Some(n) = min_freq {
                cfg.min_pair_frequency = n;
            }
            let index = TableIndex::new(&data.table);
            if !index.contains(&target) {
                bail!("{target} does not occur in {}", input.display());
            }
            let graph = build_context_graph(&target, &index, &cfg)?;
            let cliques = if primary_only {
                enumerate_cliques(&graph, CliquePolicy::PrimaryOnly, cfg.max_cliques)?
            } else {
                sense_cliques(&graph, &cfg)?
            };
            #[derive(Serialize)]
            struct Out<'a> {
                target: &'a LexicalUnit,
                contexts: usize,
                truncated: usize,
                cliques: Vec<lexatlas::Clique>,
            }
            print_json(&Out { target: &target, contexts: graph.vertices.len(), truncated: graph.truncated, cliques })
        }
        Command::Build { input, out, targets, config } => {
            let data = load_ingest(&input).with_context(|| format!("reading {}", input.display()))?;
            let cfg = match config {
                Some(p) => AtlasConfig::from_toml(&read(&p)?)?,
                None => AtlasConfig::default(),
            };
            let targets = match targets {
                Some(p) => Targets::Units(read_targets(&p, &data.table.units())?),
                None => Targets::All,
            };
            let atlas = build_atlas(&data.table, &data.sentences, &targets, &cfg);
            save_atlas(&atlas, &out)?;
            for f in &atlas.report.failures {
                eprintln!("warning: {}: {}", f.target, f.error);
            }
            print_json(&atlas.report)
        }
        Command::Link { src, tgt, dict, word, theta, min_overlap } => {
            let source = load_atlas(&src).with_context(|| format!("loading {}", src.display()))?;
            let target = load_atlas(&tgt).with_context(|| format!("loading {}", tgt.display()))?;
            let file = File::open(&dict).with_context(|| format!("opening {}", dict.display()))?;
            let dictionary = load_dictionary(BufReader::new(file), &source.language, &target.language)?;
            let params = LinkParams { theta, overlap_min: min_overlap };
            let links = link_word(&source, &word, &target, &dictionary, &params)?;
            print_json(&links)
        }
        Command::Serve { config } => {
            let cfg = ServiceConfig::from_file(&config)?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let (addr, server) = lexatlas_server::bind(&cfg).await.map_err(|e| anyhow::anyhow!(e))?;
                println!("listening on http://{addr}");
                io::stdout().flush()?;
                server.await?;
                Ok(())
            })
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Targets file lines are `lemma#POS` or a bare lemma, which selects every
/// part of speech of that lemma. Blank lines are skipped.
fn read_targets(path: &Path, known: &std::collections::BTreeSet<LexicalUnit>) -> Result<Vec<LexicalUnit>> {
    let mut out = Vec::new();
    for (n, line) in read(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.contains('#') {
            out.push(line.parse().with_context(|| format!("{}:{}", path.display(), n + 1))?);
        } else {
            out.extend(known.iter().filter(|u| u.key == line).cloned());
        }
    }
    Ok(out)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}
