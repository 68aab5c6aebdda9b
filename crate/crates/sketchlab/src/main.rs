use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde_json::json;
use sketchlab::{pipe, router, run_script, Sessions};
use sketchlab_core::eval::{evaluate, render_svg, RenderOptions};
use sketchlab_core::little::parse;
use sketchlab_core::session::Session;

#[derive(Parser)]
#[command(name = "sketchlab", version, about = "Edit little SVG programs by direct manipulation")]
struct Cli {
    /// Seed for the colors of newly drawn shapes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the shapes a program draws, as JSON.
    Eval { file: PathBuf },
    /// Print the SVG a program draws.
    Svg {
        file: PathBuf,
        /// Also draw hidden helper shapes.
        #[arg(long)]
        ghosts: bool,
    },
    /// Run a script of JSON requests (one per line) and print the final program.
    Apply {
        file: PathBuf,
        script: PathBuf,
        /// Print the final SVG instead of the code.
        #[arg(long)]
        svg: bool,
        /// Write the final program here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Serve the UI and the /rpc endpoint.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of UI assets.
        #[arg(long)]
        root: Option<PathBuf>,
    },
    /// Answer JSON requests read line by line from stdin.
    Pipe {
        /// Program to load first.
        file: Option<PathBuf>,
    },
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(seed: u64, file: &PathBuf) -> anyhow::Result<Session> {
    let mut s = Session::new(seed);
    let source = read(file)?;
    if let Err((_, r)) = run_script(&mut s, &json!({ "kind": "load", "payload": { "source": source } }).to_string()) {
        bail!("{}: {}", file.display(), r.payload["message"].as_str().unwrap_or("cannot load"));
    }
    Ok(s)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Eval { file } => {
            let p = parse(&read(&file)?)?;
            let c = evaluate(&p)?;
            println!("{}", serde_json::to_string_pretty(&c.roots)?);
        }
        Command::Svg { file, ghosts } => {
            let p = parse(&read(&file)?)?;
            print!("{}", render_svg(&evaluate(&p)?, RenderOptions { show_ghosts: ghosts }));
        }
        Command::Apply { file, script, svg, out } => {
            let mut s = load(cli.seed, &file)?;
            if let Err((line, r)) = run_script(&mut s, &read(&script)?) {
                bail!(
                    "{}:{line}: {}: {}",
                    script.display(),
                    r.payload["error"].as_str().unwrap_or_default(),
                    r.payload["message"].as_str().unwrap_or_default()
                );
            }
            let text = if svg { s.svg() } else { s.code() };
            match out {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Serve { port, root } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
                eprintln!("listening on http://{}", listener.local_addr()?);
                axum::serve(listener, router(Sessions::new(cli.seed), root)).await?;
                anyhow::Ok(())
            })?;
        }
        Command::Pipe { file } => {
            let mut s = match file {
                Some(f) => load(cli.seed, &f)?,
                None => Session::new(cli.seed),
            };
            pipe(&mut s, std::io::stdin().lock(), std::io::stdout().lock())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
