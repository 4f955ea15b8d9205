"""Train the adaptation model on a shifted synthetic pair and compare its
target-domain metrics against a source-only logistic classifier.

The source classifier sees standardized source features only; the shift
pushes the target cloud across its decision boundary. The jointly trained
model aligns the two latent distributions with the MMD term and recovers
most of the lost balanced accuracy.
"""

from iadt import TrainConfig, synth_domains, train, predict, evaluate_predictions
from iadt.baselines import logistic_fit, logistic_predict

src, tgt = synth_domains(
    n_source=400, n_target=200, shift=[1.5], rotation_angle=0.4,
    class_sep=4.0, noise_sd=0.7, dim=10, seed=0,
)
yt = tgt.labels_strict().astype(int)

model = logistic_fit(src.features(), src.labels_strict())
probs, _ = logistic_predict(model, tgt.features())
_, logistic_report = evaluate_predictions(yt, probs)

cfg = TrainConfig(latent_dim=4, lambda1=3.0, lambda2=2.0, lr=0.003,
                  epochs=300, batch_size=400, seed=0)
params, stats, history = train(src, tgt, cfg)

print("=== training losses (selected epochs) ===")
print(f"{'epoch':>6} {'mmd':>9} {'cls':>9} {'recon':>9} {'total':>9}")
for i in (0, 9, 49, 149, 299):
    rec = history.epochs[i]
    print(f"{i + 1:6d} {rec['mmd']:9.4f} {rec['cls']:9.4f} "
          f"{rec['recon']:9.4f} {rec['total']:9.4f}")

probs, _ = predict(params, stats, tgt)
_, adapted_report = evaluate_predictions(yt, probs)

print()
print("=== target-domain metrics ===")
print(f"{'':14}{'acc':>8} {'bac':>8} {'auc':>8} {'sen':>8} {'spe':>8}")
for name, report in (("logistic", logistic_report), ("adapted", adapted_report)):
    vals = report.as_dict()
    print(f"{name:14}" + " ".join(f"{vals[k]:8.3f}" for k in ("acc", "bac", "auc", "sen", "spe")))

gain = adapted_report.bac - logistic_report.bac
print()
print(f"balanced-accuracy gain from adaptation: {gain:+.3f}")
