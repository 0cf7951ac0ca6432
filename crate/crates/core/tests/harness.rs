use std::collections::HashMap;
use std::process::Command;

use cvep::harness::{
    load_dictionary, load_epochs, write_epochs, write_report, Experiment, ExperimentConfig,
    LoadedDictionary, Mode, Outcome, ReportFormat, BUNDLED_WORDS,
};
use cvep::lexicon::{signature_of_word, Dictionary, KeyboardLayout, LagSignature};
use cvep::synth::synth_epoch;
use cvep::Error;

fn experiment(sigma: f64, seed: u64) -> Experiment {
    Experiment::from_config(ExperimentConfig::with_defaults(sigma, seed).unwrap()).unwrap()
}

fn signature_classes(exp: &Experiment) -> HashMap<LagSignature, usize> {
    let layout = &exp.config().layout;
    let mut classes = HashMap::new();
    for w in exp.dictionary().words() {
        *classes.entry(signature_of_word(w, layout).unwrap()).or_insert(0) += 1;
    }
    classes
}

#[test]
fn noiseless_trials_never_commit_to_a_wrong_word() {
    let exp = experiment(0.0, 1);
    let classes = signature_classes(&exp);
    let mut unresolved = 0;
    for (i, w) in exp.dictionary().words().enumerate() {
        let r = exp.run_trial_zero_calibration(w, 1, i as u64).unwrap();
        assert!(r.lags_all_correct, "{w}");
        assert_eq!(r.emitted[0], None, "{w}");
        assert!(r.letters_consumed <= 3);
        let class = classes[&signature_of_word(w, &exp.config().layout).unwrap()];
        match &r.outcome {
            Outcome::Resolved(got) => {
                assert_eq!(got, w);
                assert_eq!(class, 1);
                assert!(r.word_correct);
                assert_eq!(r.emitted[2], w.chars().nth(2));
            }
            Outcome::Unresolved => {
                assert!(class > 1, "{w}");
                unresolved += 1;
            }
            other => panic!("{w}: {other:?}"),
        }
    }
    assert!(unresolved > 0);
}

#[test]
fn shifted_twins_stay_unresolved() {
    let layout = KeyboardLayout::with_default_keys(8);
    let full = LoadedDictionary::parse(BUNDLED_WORDS, &layout).unwrap().dictionary;
    // brute-force search for two words with the same signature
    let mut seen: HashMap<LagSignature, String> = HashMap::new();
    let pair = full
        .words()
        .find_map(|w| {
            let sig = signature_of_word(w, &layout).unwrap();
            match seen.get(&sig) {
                Some(other) => Some((other.clone(), w.to_owned())),
                None => {
                    seen.insert(sig, w.to_owned());
                    None
                }
            }
        })
        .expect("the bundled list has signature twins");
    let (dict, _) = Dictionary::from_words([&pair.0, &pair.1], &layout).unwrap();
    let exp = Experiment::new(ExperimentConfig::with_defaults(0.0, 3).unwrap(), dict).unwrap();
    for w in [&pair.0, &pair.1] {
        let r = exp.run_trial_zero_calibration(w, 2, 9).unwrap();
        assert_eq!(r.outcome, Outcome::Unresolved, "{pair:?}");
        assert!(r.lags_all_correct);
        assert!(!r.word_correct);
        assert_eq!(r.feedback[2], vec![pair.0.clone(), pair.1.clone()]);
    }
}

#[test]
fn calibrated_noiseless_decodes_everything() {
    let mut config = ExperimentConfig::with_defaults(0.0, 4).unwrap();
    config.mode = Mode::Calibrated;
    let exp = Experiment::from_config(config).unwrap();
    for (i, w) in exp.dictionary().words().step_by(13).enumerate() {
        for n in [1, 3] {
            let r = exp.run_trial(w, n, i as u64).unwrap();
            assert!(r.word_correct && r.lags_all_correct, "{w}");
            assert_eq!(r.true_lags, exp.config().layout.positions_of(w).unwrap());
        }
    }
}

#[test]
fn target_must_be_in_dictionary() {
    let exp = experiment(0.0, 1);
    assert!(matches!(
        exp.run_trial_zero_calibration("ZZQ", 2, 0),
        Err(Error::WordNotInDictionary(_))
    ));
}

#[test]
fn trials_and_reports_are_deterministic() {
    let exp = experiment(15.0, 21);
    let word = exp.dictionary().words().nth(100).unwrap().to_owned();
    assert_eq!(
        exp.run_trial_zero_calibration(&word, 3, 77).unwrap(),
        exp.run_trial_zero_calibration(&word, 3, 77).unwrap()
    );
    let a = exp.run().unwrap();
    let b = experiment(15.0, 21).run().unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let c = pool.install(|| exp.run().unwrap());
    assert_eq!(a, c);
    assert_ne!(a.to_csv(), experiment(15.0, 22).run().unwrap().to_csv());
}

#[test]
fn calibrated_accuracy_is_reproducible() {
    let mut config = ExperimentConfig::with_defaults(25.0, 8).unwrap();
    config.mode = Mode::Calibrated;
    config.trials = 500;
    config.repetitions_list = vec![2];
    let a = Experiment::from_config(config.clone()).unwrap().run().unwrap();
    let b = Experiment::from_config(config).unwrap().run().unwrap();
    assert_eq!(format!("{:.3}", a.cells[0].lag_accuracy), format!("{:.3}", b.cells[0].lag_accuracy));
    assert!(a.cells[0].lag_accuracy < 1.0);
}

#[test]
fn report_is_auditable() {
    let report = experiment(16.0, 5).run().unwrap();
    assert_eq!(report.dictionary_words, 1300);
    for cell in &report.cells {
        assert_eq!(cell.trials, 100);
        assert_eq!(cell.results.len(), cell.trials);
        let t = cell.trials as f64;
        let lag = cell.results.iter().filter(|r| r.lags_all_correct).count() as f64 / t;
        let word = cell.results.iter().filter(|r| r.word_correct).count() as f64 / t;
        let letters = cell.results.iter().map(|r| r.letters_consumed).sum::<usize>() as f64 / t;
        assert_eq!(cell.lag_accuracy, lag);
        assert_eq!(cell.word_accuracy, word);
        assert_eq!(cell.mean_letters, letters);
        assert_eq!(
            cell.correct_words + cell.unresolved + cell.empty + cell.wrong_word + cell.signal_errors,
            cell.trials
        );
        for r in &cell.results {
            assert_eq!(r.lags_all_correct, r.estimated_lags == r.true_lags);
            if r.word_correct {
                assert_eq!(r.outcome, Outcome::Resolved(r.target_word.clone()));
            }
            assert!(r.letters_consumed <= 3);
            assert_eq!(r.emitted[0], None);
        }
    }
}

#[test]
fn csv_and_json_agree() {
    let report = experiment(16.0, 6).run().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (csv_path, json_path) = (dir.path().join("r.csv"), dir.path().join("r.json"));
    write_report(&report, &csv_path, ReportFormat::Csv).unwrap();
    write_report(&report, &json_path, ReportFormat::Json).unwrap();
    let csv = std::fs::read_to_string(csv_path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("mode,N,trials,lag_accuracy,word_accuracy,mean_letters,seed"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let cells = json["cells"].as_array().unwrap();
    assert_eq!(rows.len(), cells.len());
    for (row, cell) in rows.iter().zip(cells) {
        assert_eq!(row[0], cell["mode"].as_str().unwrap());
        assert_eq!(row[1].parse::<u64>().unwrap(), cell["repetitions"].as_u64().unwrap());
        assert_eq!(row[2].parse::<u64>().unwrap(), cell["trials"].as_u64().unwrap());
        for (i, key) in [(3, "lag_accuracy"), (4, "word_accuracy"), (5, "mean_letters")] {
            assert!(row[i].split('.').nth(1).unwrap().len() >= 4, "{}", row[i]);
            assert_eq!(row[i].parse::<f64>().unwrap(), cell[key].as_f64().unwrap());
        }
        assert_eq!(row[6].parse::<u64>().unwrap(), json["seed"].as_u64().unwrap());
    }
    assert_eq!(json["dictionary_words"], 1300);
}

#[test]
fn epoch_files_round_trip() {
    let cfg = cvep::synth::SynthConfig::with_defaults(3.0, 2).unwrap();
    let epochs: Vec<_> = (0..3).map(|p| synth_epoch(&cfg, p * 7, 2, p as u64).unwrap()).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.txt");
    write_epochs(&path, &epochs).unwrap();
    assert_eq!(load_epochs(&path).unwrap(), epochs);
    assert!(matches!(
        load_epochs(&dir.path().join("missing.txt")),
        Err(Error::FileNotFound { .. })
    ));
}

#[test]
fn dictionary_files() {
    let layout = KeyboardLayout::with_default_keys(8);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.txt");
    std::fs::write(&path, "cat\ndog\n# comment\ncat\nc4t\n").unwrap();
    let loaded = load_dictionary(&path, &layout).unwrap();
    assert_eq!(loaded.dictionary.len(), 2);
    assert!(loaded.dictionary.contains("CAT") && loaded.dictionary.contains("DOG"));
    assert_eq!(loaded.rejected, vec!["c4t".to_string()]);
    std::fs::write(&path, "# nothing\n1a\n").unwrap();
    assert!(matches!(load_dictionary(&path, &layout), Err(Error::DictionaryEmpty)));
    assert!(matches!(
        load_dictionary(&dir.path().join("nope"), &layout),
        Err(Error::FileNotFound { .. })
    ));
}

#[test]
fn invalid_configs_are_rejected() {
    let mut config = ExperimentConfig::with_defaults(0.0, 1).unwrap();
    config.trials = 0;
    assert!(matches!(Experiment::from_config(config), Err(Error::ConfigInvalid(_))));
    let mut config = ExperimentConfig::with_defaults(0.0, 1).unwrap();
    config.mode = Mode::Calibrated;
    config.calibration_chars.clear();
    assert!(matches!(Experiment::from_config(config), Err(Error::ConfigInvalid(_))));
    let mut config = ExperimentConfig::with_defaults(0.0, 1).unwrap();
    config.word_length = 1;
    assert!(Experiment::from_config(config).is_err());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cvep"))
}

#[test]
fn cli_gen_code() {
    let out = cli().arg("gen-code").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 33);
    assert_eq!(lines[0].len(), 63);
    assert!(lines[2].starts_with("1,2,"));
}

#[test]
fn cli_errors_exit_nonzero() {
    assert!(!cli().args(["simulate", "--noise-sigma", "0"]).output().unwrap().status.success());
    let out = cli()
        .args(["simulate", "--seed", "1", "--dictionary", "/nonexistent/words.txt"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert!(!cli().args(["gen-code", "--taps", "6,3"]).output().unwrap().status.success());
}

#[test]
fn cli_synth_filter_decode() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.txt");
    let filtered = dir.path().join("filtered.txt");
    let exp = experiment(0.0, 1);
    let classes = signature_classes(&exp);
    let word = exp
        .dictionary()
        .words()
        .find(|w| classes[&signature_of_word(w, &exp.config().layout).unwrap()] == 1)
        .unwrap()
        .to_owned();
    let status = cli()
        .args(["synth", "--word", &word, "--repetitions", "2", "--seed", "4", "--output"])
        .arg(&raw)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(load_epochs(&raw).unwrap().len(), 3);
    assert!(cli().arg("filter").arg("--input").arg(&raw).arg("--output").arg(&filtered).status().unwrap().success());
    assert_eq!(load_epochs(&filtered).unwrap().len(), 3);
    let out = cli().args(["decode", "--no-filter", "--input"]).arg(&filtered).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(&format!("resolved: {word}")), "{text}");
}

fn lag_accuracy(mode: Mode, repetitions: usize, trials: usize) -> f64 {
    let mut config = ExperimentConfig::with_defaults(17.0, 12).unwrap();
    config.mode = mode;
    config.trials = trials;
    config.repetitions_list = vec![repetitions];
    Experiment::from_config(config).unwrap().run().unwrap().cells[0].lag_accuracy
}

#[test]
fn zero_calibration_reaches_three_quarters_by_eight_repetitions() {
    let acc = lag_accuracy(Mode::ZeroCalibration, 8, 300);
    assert!(acc >= 0.75, "{acc}");
}

/// Claim: at the same noise level the calibrated baseline needs more
/// repetitions than zero-calibration to reach comparable accuracy. Under
/// white noise the calibrated template averages 3N clean-aligned epochs
/// while the relative scan correlates two N-averages, so the baseline is
/// ahead at every N and this does not hold.
#[test]
#[ignore = "does not hold under white-noise synthesis; see README"]
fn calibrated_baseline_lags_behind_zero_calibration() {
    let zero = lag_accuracy(Mode::ZeroCalibration, 8, 300);
    let calibrated = lag_accuracy(Mode::Calibrated, 8, 300);
    assert!(calibrated < zero, "calibrated {calibrated} vs zero-calibration {zero}");
}
