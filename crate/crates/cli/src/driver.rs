//! The `munj` command: argument handling, per-file processing and the
//! summary line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use munj_core::*;

use crate::ast::{Decl, DeclKind, Theorem, TheoryFile};
use crate::parser::parse_str;

/// Exit status: everything checked.
pub const EXIT_OK: i32 = 0;
/// Exit status: a proof, rule or definition was rejected.
pub const EXIT_REJECTED: i32 = 1;
/// Exit status: fuel ran out, or the input could not be read or parsed.
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "munj", version, about = "Proof checker for natural deduction modulo rewriting")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Step budget for proof reduction and for each rewriting normalization.
    #[arg(long, default_value_t = DEFAULT_REDUCTION_FUEL)]
    fuel: u64,
    /// Re-check every intermediate reduct against the theorem's statement.
    #[arg(long)]
    debug_subject_reduction: bool,
    /// Print every assumption the verdict relies on.
    #[arg(long)]
    trust_report: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check every declaration and theorem of the given files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a file, then normalize one theorem's proof.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        theorem: String,
        /// Print each contraction.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run only the admissibility checks of recursive definitions.
    Admit {
        file: PathBuf,
        #[arg(long)]
        trust_report: bool,
    },
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub fuel: u64,
    pub subject_reduction: bool,
}

impl Options {
    pub fn new() -> Self {
        Options {
            fuel: DEFAULT_REDUCTION_FUEL,
            subject_reduction: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Check,
    /// Declarations only; theorems are skipped.
    Admit,
}

/// What processing one file produced.
#[derive(Debug, Clone, Default)]
pub struct Session {
    pub sig: Signature,
    pub rs: RewriteSystem,
    /// Statements of the theorems that checked, in order.
    pub lemmas: Context,
    pub trust: TrustLog,
    pub theorems: usize,
    pub admitted: usize,
    pub failed: usize,
    pub resource: bool,
    /// Diagnostics for stderr.
    pub diags: Vec<String>,
    /// Report lines for stdout.
    pub out: Vec<String>,
}

impl Session {
    pub fn exit_code(&self) -> i32 {
        if self.resource {
            EXIT_ERROR
        } else if self.failed > 0 {
            EXIT_REJECTED
        } else {
            EXIT_OK
        }
    }

    fn error(&mut self, label: &str, d: &Decl, what: &str, e: &Error) {
        self.failed += 1;
        self.resource |= e.is_resource();
        self.diags.push(format!("{label}:{}: error: {what}: {e}", d.pos));
    }

    fn merge(&mut self, other: Session) {
        self.theorems += other.theorems;
        self.admitted += other.admitted;
        self.failed += other.failed;
        self.resource |= other.resource;
        self.trust.extend(&other.trust);
        self.diags.extend(other.diags);
        self.out.extend(other.out);
    }

    pub fn result_line(&self) -> String {
        if self.failed == 0 && !self.resource {
            format!("RESULT ok theorems={} admitted={}", self.theorems, self.admitted)
        } else {
            format!(
                "RESULT fail theorems={} admitted={} failed={}",
                self.theorems,
                self.admitted,
                self.failed.max(1)
            )
        }
    }
}

/// Processes the declarations of `file` in order.
pub fn process(file: &TheoryFile, label: &str, opts: &Options, mode: Mode) -> Session {
    let mut s = Session {
        rs: RewriteSystem::new().with_fuel(opts.fuel),
        ..Session::default()
    };
    for d in &file.decls {
        match &d.kind {
            DeclKind::Sort(x) => {
                if let Err(e) = s.sig.add_sort(x) {
                    s.error(label, d, "sort", &e);
                }
            }
            DeclKind::Const(c, ty) => {
                if let Err(e) = s.sig.add_const(c, ty.clone()) {
                    s.error(label, d, "constant", &e);
                }
            }
            DeclKind::Pred(a, ty) => {
                if let Err(e) = s.sig.add_pred(a, ty) {
                    s.error(label, d, "predicate", &e);
                }
            }
            DeclKind::Define(..) => {}
            DeclKind::Rewrite(r) => match munj_core::rewrite::validate_rule(&s.sig, r) {
                Ok(()) => s.rs.add_rule(r.clone()),
                Err(e) => s.error(label, d, "rewrite rule", &e),
            },
            DeclKind::Recursive(rec) => {
                let mut declared = true;
                for (a, ty) in &rec.preds {
                    if let Err(e) = s.sig.add_pred(a, ty) {
                        s.error(label, d, "recursive definition", &e);
                        declared = false;
                    }
                }
                if !declared {
                    continue;
                }
                let names: Vec<&str> = rec.preds.iter().map(|(a, _)| &**a).collect();
                match admit(&s.sig, &mut s.rs, rec.rules.clone(), &rec.order) {
                    Ok(adm) => {
                        s.admitted += 1;
                        s.trust.extend(&adm.trust);
                        s.out.push(format!("admitted {} by {}", names.join(", "), rec.order));
                        for w in adm.warnings {
                            s.diags.push(format!("{label}:{}: warning: {w}", d.pos));
                        }
                    }
                    Err(e) => {
                        s.out.push(format!("rejected {}", names.join(", ")));
                        s.error(label, d, &format!("recursive definition of {}", names.join(", ")), &e);
                    }
                }
            }
            DeclKind::Theorem(t) => {
                if mode == Mode::Admit {
                    continue;
                }
                match check_theorem(&s, t, opts) {
                    Ok(log) => {
                        s.theorems += 1;
                        s.trust.extend(&log);
                        s.lemmas.push(t.name.clone(), t.statement());
                    }
                    Err(e) => s.error(label, d, &format!("theorem {}", t.name), &e),
                }
            }
        }
    }
    s.trust.extend(&s.rs.trust_log());
    s
}

/// Lemmas preceding `t`, then its own hypotheses. A theorem never sees
/// itself or anything proved after it.
fn hypotheses(s: &Session, t: &Theorem) -> Context {
    let mut ctx = Context::from_pairs(s.lemmas.iter().take_while(|(n, _)| *n != t.name).cloned());
    for (h, a) in &t.hyps {
        ctx.push(h.clone(), a.clone());
    }
    ctx
}

/// Checks `t` against the declarations processed so far; with subject
/// reduction on, also normalizes it and re-checks every reduct.
pub fn check_theorem(s: &Session, t: &Theorem, opts: &Options) -> Result<TrustLog> {
    let ctx = hypotheses(s, t);
    let log = check_proof(&s.sig, &s.rs, &t.term_ctx(), &ctx, &t.proof, &t.goal)?;
    if opts.subject_reduction {
        normalize_theorem(s, t, opts, false)?;
    }
    Ok(log)
}

pub fn normalize_theorem(s: &Session, t: &Theorem, opts: &Options, trace: bool) -> Result<Outcome> {
    let mut r = Reducer::new(&s.rs).with_fuel(opts.fuel).with_trace(trace);
    if opts.subject_reduction {
        r = r.with_subject_check(SubjectCheck {
            sig: &s.sig,
            terms: t.term_ctx(),
            ctx: hypotheses(s, t),
            goal: t.goal.clone(),
        });
    }
    r.normalize(&t.proof)
}

fn read(path: &Path) -> Result<TheoryFile, String> {
    let src = std::fs::read_to_string(path).map_err(|e| format!("{}: error: {e}", path.display()))?;
    parse_str(&src).map_err(|e| format!("{}:{}: error: {}", path.display(), e.pos, e.msg))
}

fn failed_input(msg: String) -> Session {
    Session {
        failed: 1,
        resource: true,
        diags: vec![msg],
        ..Session::default()
    }
}

/// Stack for kernel threads. Terms grown by long rewrite chains are deep,
/// and the kernel walks them recursively.
const KERNEL_STACK: usize = 512 << 20;

fn kernel_thread<'s, 'e, T: Send + 's>(
    scope: &'s std::thread::Scope<'s, 'e>,
    f: impl FnOnce() -> T + Send + 's,
) -> std::thread::ScopedJoinHandle<'s, T> {
    std::thread::Builder::new()
        .stack_size(KERNEL_STACK)
        .spawn_scoped(scope, f)
        .expect("cannot spawn a kernel thread")
}

fn on_kernel_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|scope| kernel_thread(scope, f).join().expect("kernel thread panicked"))
}

fn check_files(files: &[PathBuf], opts: &Options) -> Session {
    let sessions: Vec<Session> = std::thread::scope(|scope| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| {
                kernel_thread(scope, move || match read(f) {
                    Ok(file) => process(&file, &f.display().to_string(), opts, Mode::Check),
                    Err(msg) => failed_input(msg),
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("checker thread panicked")).collect()
    });
    let mut total = Session::default();
    for s in sessions {
        total.merge(s);
    }
    total
}

fn normalize_file(path: &Path, name: &str, opts: &Options, trace: bool) -> Session {
    let file = match read(path) {
        Ok(f) => f,
        Err(msg) => return failed_input(msg),
    };
    let label = path.display().to_string();
    // Check without re-running reduction; the named theorem is reduced below.
    let check_opts = Options {
        subject_reduction: false,
        ..opts.clone()
    };
    let mut s = process(&file, &label, &check_opts, Mode::Check);
    let Some(t) = file.theorem(name) else {
        s.failed += 1;
        s.resource = true;
        s.diags.push(format!("{label}: error: no theorem named `{name}`"));
        return s;
    };
    if !s.lemmas.iter().any(|(n, _)| *n == t.name) {
        s.diags.push(format!("{label}: error: theorem {name} did not check; not normalizing"));
        s.failed = s.failed.max(1);
        return s;
    }
    match normalize_theorem(&s, t, opts, trace) {
        Ok(out) => {
            for (i, st) in out.trace.iter().enumerate() {
                s.out.push(format!("step {}: {st}", i + 1));
            }
            s.out.push(format!("NORMAL {}", out.proof));
            s.out.push(format!("STEPS {}", out.steps));
        }
        Err(e) => {
            s.failed += 1;
            s.resource |= e.is_resource();
            s.diags.push(format!("{label}: error: normalizing {name}: {e}"));
        }
    }
    s
}

fn admit_file(path: &Path) -> Session {
    match read(path) {
        Ok(file) => process(&file, &path.display().to_string(), &Options::new(), Mode::Admit),
        Err(msg) => failed_input(msg),
    }
}

/// Runs the command line `args` (program name first), writing reports to
/// `out` and diagnostics to `err`; returns the exit status.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let (session, trust_report) = match cli.cmd {
        Cmd::Check { files, common } => {
            let opts = Options {
                fuel: common.fuel,
                subject_reduction: common.debug_subject_reduction,
            };
            (check_files(&files, &opts), common.trust_report)
        }
        Cmd::Normalize {
            file,
            theorem,
            trace,
            common,
        } => {
            let opts = Options {
                fuel: common.fuel,
                subject_reduction: common.debug_subject_reduction,
            };
            (on_kernel_stack(|| normalize_file(&file, &theorem, &opts, trace)), common.trust_report)
        }
        Cmd::Admit { file, trust_report } => (on_kernel_stack(|| admit_file(&file)), trust_report),
    };
    for d in &session.diags {
        let _ = writeln!(err, "{d}");
    }
    for l in &session.out {
        let _ = writeln!(out, "{l}");
    }
    if trust_report {
        let _ = writeln!(out, "{}", session.trust);
    }
    let _ = writeln!(out, "{}", session.result_line());
    session.exit_code()
}
