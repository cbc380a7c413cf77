use std::fmt::Write as _;

use super::parse::{InputSource, Sink};
use super::plan::{PipelinePlan, StageMode};
use crate::dsl::Combiner;

/// Quotes `s` for a POSIX shell.
pub fn shell_quote(s: &str) -> String {
    if !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b"-_./=:,+%@".contains(&b)) {
        return s.to_string();
    }
    format!("'{}'", s.replace('\'', r"'\''"))
}

/// Commands that report "no match" with status 1 must not stop the script.
fn guarded(cmd: &str, input: &str, output: &str) -> String {
    format!("{{ {cmd}; }} < {input} > {output} || [ $? -eq 1 ]")
}

/// Renders `plan` as a standalone POSIX shell script that uses GNU `split`
/// and `sort -m`, and calls `$COMBSYNTH combine` for other combiners.
pub fn emit_script(plan: &PipelinePlan) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "#!/bin/sh");
    let _ = writeln!(s, "# parallel plan: width {}, {} stages", plan.width, plan.stages.len());
    s.push_str("set -eu\nexport LC_ALL=C\nCOMBSYNTH=${COMBSYNTH:-combsynth}\n");
    s.push_str("T=$(mktemp -d)\ntrap 'rm -rf \"$T\"' EXIT INT TERM\n");
    s.push_str("parts() {\n  for p in \"$1\"/p.*; do\n    if [ -s \"$p\" ]; then printf '%s\\n' \"$p\"; fi\n  done\n}\n\n");
    match &plan.input {
        InputSource::Stdin => s.push_str("cat > \"$T/s0\"\n"),
        InputSource::File(f) => {
            let _ = writeln!(s, "cat {} > \"$T/s0\"", f.raw);
        }
    }

    for (n, group) in plan.groups().into_iter().enumerate() {
        let input = format!("\"$T/s{n}\"");
        let output = format!("\"$T/s{}\"", n + 1);
        let cmds: Vec<&str> = group.iter().map(|&i| plan.stages[i].exec_command.as_str()).collect();
        let _ = writeln!(s, "\n# {}", cmds.join(" | "));
        let first = &plan.stages[group[0]];
        if first.mode == StageMode::Sequential {
            let _ = writeln!(s, "{}", guarded(cmds[0], &input, &output));
            continue;
        }
        let dir = format!("\"$T/g{n}\"");
        let _ = writeln!(s, "mkdir {dir}");
        let _ = writeln!(s, "split -n l/{} -d -a 3 {input} {dir}/p.", plan.width);
        let _ = writeln!(s, "P=$(parts {dir})");
        s.push_str("if [ \"$(printf '%s\\n' \"$P\" | grep -c .)\" -lt 2 ]; then\n");
        let mut serial = input.clone();
        for (j, cmd) in cmds.iter().enumerate() {
            let out = if j + 1 == cmds.len() { output.clone() } else { format!("\"$T/g{n}/serial.{j}\"") };
            let _ = writeln!(s, "  {}", guarded(cmd, &serial, &out));
            serial = out;
        }
        s.push_str("else\n  pids=\n  for p in $P; do\n    (\n");
        let mut cur = "\"$p\"".to_string();
        for (j, cmd) in cmds.iter().enumerate() {
            let out = format!("\"$p.{j}\"");
            let _ = writeln!(s, "      {}", guarded(cmd, &cur, &out));
            cur = out;
        }
        s.push_str("    ) &\n    pids=\"$pids $!\"\n  done\n  for pid in $pids; do wait \"$pid\"; done\n");
        let last = cmds.len() - 1;
        let outs = format!("$(for p in $P; do printf '%s.{last} ' \"$p\"; done)");
        let exit = &plan.stages[*group.last().expect("nonempty")];
        let combiner = exit.combiner.as_ref().expect("parallel stages carry a combiner");
        let line = match combiner.members() {
            [Combiner::Merge(flags), ..] => {
                let flags: Vec<String> = flags.as_slice().iter().map(|f| shell_quote(f)).collect();
                let sep = if flags.is_empty() { "" } else { " " };
                format!("sort -m{sep}{} {outs} > {output}", flags.join(" "))
            }
            [Combiner::Concat] => format!("cat {outs} > {output}"),
            m if m.iter().all(|c| *c == Combiner::Rerun) => {
                format!("cat {outs} | {{ {}; }} > {output} || [ $? -eq 1 ]", exit.exec_command)
            }
            _ => format!(
                "\"$COMBSYNTH\" combine --cmd {} --combiner {} {outs} > {output}",
                shell_quote(&exit.exec_command),
                shell_quote(&combiner.to_string())
            ),
        };
        let _ = writeln!(s, "  {line}");
        s.push_str("fi\n");
    }

    let n = plan.groups().len();
    match &plan.sink {
        Sink::Stdout => {
            let _ = writeln!(s, "\ncat \"$T/s{n}\"");
        }
        Sink::File(f) => {
            let _ = writeln!(s, "\ncat \"$T/s{n}\" > {}", f.raw);
        }
    }
    s
}
