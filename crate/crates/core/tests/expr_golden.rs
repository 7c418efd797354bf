//! Expression evaluation against 40-digit reference values.

#![allow(clippy::excessive_precision)]

use sugeno_hadamard::FunctionExpr;

const GOLDEN: [(&str, f64, f64); 50] = [
    ("x^5/4", 0.3, 0.00060749999999999988759),
    ("x^5/4", 1.7, 3.5496424999999995364),
    ("x^2/2", 0.3, 0.044999999999999996669),
    ("x^2/2", 1.7, 1.4449999999999999245),
    ("x^3/2", 0.3, 0.013499999999999998501),
    ("x^3/2", 1.7, 2.4564999999999998075),
    ("x^(3/2)", 0.3, 0.16431676725154982492),
    ("x^(3/2)", 1.7, 2.2165288177689004761),
    ("x^(1/2)", 0.3, 0.54772255750516610332),
    ("x^(1/2)", 1.7, 1.3038404810405297259),
    ("1/x^2", 0.3, 11.111111111111111933),
    ("1/x^2", 1.7, 0.34602076124567475856),
    ("1/x^4", 0.3, 123.4567901234568084),
    ("1/x^4", 1.7, 0.11973036721303625489),
    ("2^x", 0.3, 1.231144413344916275),
    ("2^x", 1.7, 3.2490095854249419904),
    ("x^x", 0.3, 0.69684530193594893172),
    ("x^x", 1.7, 2.4646948994848697098),
    ("-x^2 + 3*x", 0.3, 0.80999999999999997335),
    ("-x^2 + 3*x", 1.7, 2.2100000000000000178),
    ("(x + 1)^(-2)", 0.3, 0.59171597633136095685),
    ("(x + 1)^(-2)", 1.7, 0.13717421124828532687),
    ("sqrt(x) / (1 + x)", 0.3, 0.42132504423474316),
    ("sqrt(x) / (1 + x)", 1.7, 0.48290388186686286938),
    ("exp(-x) * x^2", 0.3, 0.066673639861354603751),
    ("exp(-x) * x^2", 1.7, 0.52795538451240313501),
    ("ln(1 + x) + 0.5", 0.3, 0.7623642644674910435),
    ("ln(1 + x) + 0.5", 1.7, 1.4932517730102833737),
    ("abs(2*x - 1)", 0.3, 0.4000000000000000222),
    ("abs(2*x - 1)", 1.7, 2.3999999999999999112),
    ("1 - abs(2*x - 1)", 0.3, 0.5999999999999999778),
    ("1 - abs(2*x - 1)", 1.7, -1.3999999999999999112),
    ("2^3^x", 0.3, 2.6214938663659299976),
    ("2^3^x", 1.7, 88.832016748502747259),
    ("-2^2 + x", 0.3, -3.7000000000000000111),
    ("-2^2 + x", 1.7, -2.3000000000000000444),
    ("exp(-((x - 1.5) / 0.7)^2)", 0.3, 0.052930501932708732747),
    ("exp(-((x - 1.5) / 0.7)^2)", 1.7, 0.92161044729772485229),
    ("3.5 / (1 + (x - 2)^2)", 0.3, 0.89974293059125963137),
    ("3.5 / (1 + (x - 2)^2)", 1.7, 3.211009174311926527),
    ("x^(-0.5)", 0.3, 1.8257418583505537453),
    ("x^(-0.5)", 1.7, 0.76696498884737044703),
    ("1e-3 * x + 2.5e1", 0.3, 25.0003),
    ("1e-3 * x + 2.5e1", 1.7, 25.0017),
    ("(x - 1)*(x - 2)*(x - 3)", 0.3, -3.2130000000000000852),
    ("(x - 1)*(x - 2)*(x - 3)", 1.7, 0.27300000000000003242),
    ("sqrt(x^2 + 1)", 0.3, 1.0440306508910550148),
    ("sqrt(x^2 + 1)", 1.7, 1.9723082923316019585),
    ("ln(x) / x", 0.3, -4.0132426810864535806),
    ("ln(x) / x", 1.7, 0.31213426533068846116),
];

#[test]
fn matches_high_precision_reference() {
    for (text, x, expect) in GOLDEN {
        let f = FunctionExpr::parse(text).unwrap();
        let got = f.evaluate(x).unwrap();
        let err = (got - expect).abs() / expect.abs().max(1.0);
        assert!(err <= 1e-12, "{text} at {x}: {got} vs {expect} (rel {err:e})");
    }
}

#[test]
fn serialized_form_evaluates_identically() {
    for (text, x, _) in GOLDEN {
        let f = FunctionExpr::parse(text).unwrap();
        let again = FunctionExpr::parse(&f.serialize()).unwrap();
        assert_eq!(f.evaluate(x).unwrap().to_bits(), again.evaluate(x).unwrap().to_bits(), "{text}");
    }
}
