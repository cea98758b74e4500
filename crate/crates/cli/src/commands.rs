use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::Context;
use substream_index::index::format;
use substream_index::{
    build_greedy, build_parallel, closeness_baseline, closeness_oracle, closeness_via_index, read_edge_list,
    stream_stats, validate, EdgeStream, Interval, ParallelConfig, ParseOptions, QueryKind, QueryResult,
    SubstreamIndex, INFINITY,
};

use crate::output::{general, write_ranking, write_values};
use crate::{Algorithm, BuildArgs, Command, Engine, Failure, Format, InputArgs, IntervalArgs, Kind};

type Outcome = Result<(), Failure>;

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Stats { input, format } => stats(&input, format),
        Command::Build {
            input,
            index,
            params,
            validate,
        } => build(&input, &index, params, validate),
        Command::Query {
            index,
            source,
            interval,
            kind,
            format,
        } => query(&index, &source, interval, kind, format),
        Command::Closeness {
            input,
            index,
            params,
            interval,
            engine,
            format,
            output,
        } => {
            let input = input.input.map(|path| InputArgs {
                input: path,
                undirected: input.undirected,
                default_transition: input.default_transition,
            });
            closeness(input.as_ref(), index.as_deref(), params, interval, engine, format, output.as_deref())
        }
        Command::Bench {
            input,
            k,
            h,
            batch_size,
            seed,
            threads,
            interval,
        } => bench(&input, &k, h, batch_size, seed, threads, interval),
    }
}

fn check_input(input: &InputArgs) -> Outcome {
    if input.default_transition == 0 {
        return Err(Failure::Usage("--default-transition must be at least 1".into()));
    }
    Ok(())
}

fn check_build(params: &BuildArgs) -> Outcome {
    if params.k < 2 {
        return Err(Failure::Usage(format!("--k must be at least 2, got {}", params.k)));
    }
    if params.h == 0 {
        return Err(Failure::Usage("--h must be at least 1".into()));
    }
    Ok(())
}

fn interval(args: IntervalArgs) -> Result<Interval, Failure> {
    Interval::new(args.from, args.to.unwrap_or(INFINITY)).map_err(|e| Failure::Usage(e.to_string()))
}

fn show_interval(i: Interval) -> String {
    if i.end == INFINITY {
        format!("[{}, inf]", i.start)
    } else {
        format!("[{}, {}]", i.start, i.end)
    }
}

fn load_stream(input: &InputArgs) -> Result<EdgeStream, Failure> {
    let opts = ParseOptions {
        default_transition: input.default_transition,
        undirected: input.undirected,
    };
    read_edge_list(&input.input, opts)
        .with_context(|| format!("reading {}", input.input.display()))
        .map_err(Failure::Data)
}

fn input_config(input: &InputArgs) -> String {
    format!(
        "input={} undirected={} default_transition={}",
        input.input.display(),
        input.undirected,
        input.default_transition
    )
}

fn build_config(p: &BuildArgs) -> String {
    let algorithm = match p.algorithm {
        Algorithm::Greedy => "greedy",
        Algorithm::Sketch => "sketch",
    };
    format!(
        "algorithm={algorithm} k={} h={} batch_size={} seed={} threads={}",
        p.k, p.h, p.batch_size, p.seed, p.threads
    )
}

fn build_index(stream: Arc<EdgeStream>, p: &BuildArgs) -> substream_index::Result<SubstreamIndex> {
    match p.algorithm {
        Algorithm::Greedy => build_greedy(stream, p.k),
        Algorithm::Sketch => build_parallel(
            stream,
            &ParallelConfig {
                k: p.k,
                h: p.h,
                batch_size: p.batch_size,
                seed: p.seed,
                threads: p.threads,
            },
        ),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.6}", d.as_secs_f64())
}

fn stats(input: &InputArgs, fmt: Format) -> Outcome {
    check_input(input)?;
    eprintln!("# config: command=stats {}", input_config(input));
    let s = load_stream(input)?;
    let st = stream_stats(&s);
    let mut out = io::stdout().lock();
    match fmt {
        Format::Csv => {
            writeln!(out, "vertices,edges,timestamps,avg_reachable,max_reachable")?;
            writeln!(
                out,
                "{},{},{},{},{}",
                st.vertices,
                st.edges,
                st.timestamps,
                general(st.avg_reachable, 12),
                st.max_reachable
            )?;
        }
        Format::Json => {
            let v = serde_json::json!({
                "vertices": st.vertices,
                "edges": st.edges,
                "timestamps": st.timestamps,
                "avg_reachable": st.avg_reachable,
                "max_reachable": st.max_reachable,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).map_err(anyhow::Error::from)?)?;
        }
    }
    Ok(())
}

fn build(input: &InputArgs, path: &Path, params: BuildArgs, check: bool) -> Outcome {
    check_input(input)?;
    check_build(&params)?;
    println!(
        "# config: command=build {} index={} {}",
        input_config(input),
        path.display(),
        build_config(&params)
    );
    let s = Arc::new(load_stream(input)?);
    let started = Instant::now();
    let ix = build_index(s, &params)?;
    let build_time = started.elapsed();
    let bytes = format::to_bytes(&ix);
    std::fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?;

    println!("build_seconds {}", secs(build_time));
    println!("size_edges {}", ix.size());
    println!("index_bytes {}", bytes.len());
    println!("stored_edges {}", ix.total_edges());
    println!("query_work {}", ix.query_work());
    println!("substream,edges,vertices_assigned");
    for (j, (sub, count)) in ix.substreams().iter().zip(ix.assigned_counts()).enumerate() {
        println!("{},{},{}", j + 1, sub.len(), count);
    }
    if check {
        let report = validate(&ix);
        println!("violations {}", report.violations.len());
        if !report.is_clean() {
            return Err(Failure::Invariant(format!("{:?}", report.violations)));
        }
    }
    Ok(())
}

fn query(path: &Path, source: &str, iv: IntervalArgs, kind: Kind, fmt: Format) -> Outcome {
    let tau = interval(iv)?;
    let kind_name = match kind {
        Kind::Ea => "ea",
        Kind::Fastest => "fastest",
    };
    eprintln!(
        "# config: command=query index={} source={source} interval={} kind={kind_name}",
        path.display(),
        show_interval(tau)
    );
    let ix = format::load(path).with_context(|| format!("loading {}", path.display()))?;
    let s = ix.stream().clone();
    let v = s.vertex(source)?;
    let qk = match kind {
        Kind::Ea => QueryKind::EarliestArrival,
        Kind::Fastest => QueryKind::Fastest,
    };
    let (column, values) = match ix.query(v, tau, qk)? {
        QueryResult::Arrival(t) => ("arrival", t.arrival),
        QueryResult::Duration(t) => ("duration", t.duration),
    };
    write_values(io::stdout().lock(), &s, column, &values, fmt == Format::Json)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn closeness(
    input: Option<&InputArgs>,
    index: Option<&Path>,
    params: BuildArgs,
    iv: IntervalArgs,
    engine: Engine,
    fmt: Format,
    output: Option<&Path>,
) -> Outcome {
    let tau = interval(iv)?;
    if let Some(input) = input {
        check_input(input)?;
    }
    if index.is_none() {
        check_build(&params)?;
    }
    let engine_name = match engine {
        Engine::Index => "index",
        Engine::Fullstream => "fullstream",
        Engine::Oracle => "oracle",
    };
    let source = match (input, index) {
        (_, Some(path)) => format!("index={} threads={}", path.display(), params.threads),
        (Some(input), None) => format!("{} {}", input_config(input), build_config(&params)),
        (None, None) => return Err(Failure::Usage("closeness needs --input or --index".into())),
    };
    eprintln!(
        "# config: command=closeness {source} interval={} engine={engine_name}",
        show_interval(tau)
    );

    let started = Instant::now();
    let (stream, ix) = match index {
        Some(path) => {
            let ix = format::load(path).with_context(|| format!("loading {}", path.display()))?;
            (ix.stream().clone(), Some(ix))
        }
        None => (Arc::new(load_stream(input.expect("checked above"))?), None),
    };
    let load_time = started.elapsed();

    let started = Instant::now();
    let ix = match (engine, ix) {
        (Engine::Index, None) => Some(build_index(stream.clone(), &params)?),
        (_, ix) => ix,
    };
    let build_time = if engine == Engine::Index && index.is_none() {
        started.elapsed()
    } else {
        Duration::ZERO
    };

    let started = Instant::now();
    let ranking = match engine {
        Engine::Index => closeness_via_index(ix.as_ref().expect("built above"), tau, params.threads)?,
        Engine::Fullstream => closeness_baseline(&stream, tau, params.threads)?,
        Engine::Oracle => closeness_oracle(&stream, tau, params.threads)?,
    };
    let query_time = started.elapsed();

    let json = fmt == Format::Json;
    match output {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_ranking(&mut w, &stream, &ranking, json)?;
            w.flush()?;
        }
        None => write_ranking(io::stdout().lock(), &stream, &ranking, json)?,
    }
    eprintln!(
        "# timing: load_seconds={} build_seconds={} query_seconds={} total_seconds={}",
        secs(load_time),
        secs(build_time),
        secs(query_time),
        secs(build_time + query_time)
    );
    Ok(())
}

fn bench(
    input: &InputArgs,
    ks: &[usize],
    h: usize,
    batch_size: usize,
    seed: u64,
    threads: usize,
    iv: IntervalArgs,
) -> Outcome {
    check_input(input)?;
    if ks.is_empty() || ks.iter().any(|&k| k < 2) {
        return Err(Failure::Usage("--k needs values of at least 2".into()));
    }
    if h == 0 {
        return Err(Failure::Usage("--h must be at least 1".into()));
    }
    let tau = interval(iv)?;
    let list: Vec<String> = ks.iter().map(usize::to_string).collect();
    eprintln!(
        "# config: command=bench {} k={} h={h} batch_size={batch_size} seed={seed} threads={threads} interval={}",
        input_config(input),
        list.join(","),
        show_interval(tau)
    );
    let s = Arc::new(load_stream(input)?);

    let started = Instant::now();
    let base = closeness_baseline(&s, tau, threads)?;
    let baseline = started.elapsed();

    let mut out = io::stdout().lock();
    writeln!(
        out,
        "k,build_seconds,query_seconds,total_seconds,baseline_seconds,speedup,size_edges,stored_edges,index_bytes,query_work"
    )?;
    for &k in ks {
        let cfg = ParallelConfig {
            k,
            h,
            batch_size,
            seed,
            threads,
        };
        let started = Instant::now();
        let ix = build_parallel(s.clone(), &cfg)?;
        let build_time = started.elapsed();
        let started = Instant::now();
        let ranking = closeness_via_index(&ix, tau, threads)?;
        let query_time = started.elapsed();
        if !ranking.agrees_with(&base, 1e-12) {
            return Err(Failure::Invariant(format!("k={k}: index ranking differs from full-stream ranking")));
        }
        let total = build_time + query_time;
        writeln!(
            out,
            "{k},{},{},{},{},{:.3},{},{},{},{}",
            secs(build_time),
            secs(query_time),
            secs(total),
            secs(baseline),
            baseline.as_secs_f64() / total.as_secs_f64(),
            ix.size(),
            ix.total_edges(),
            format::to_bytes(&ix).len(),
            ix.query_work()
        )?;
    }
    Ok(())
}
