"""Names of the 90 cortical/subcortical regions of the AAL atlas.

Indices follow the atlas convention: 1-based, odd = left hemisphere,
even = right. These are the default feature names for 90-dimensional
ROI datasets and the names reported by the ROI ranking.
"""

_PAIRS = [
    "Precentral gyrus",
    "Superior frontal gyrus, dorsolateral",
    "Superior frontal gyrus, orbital part",
    "Middle frontal gyrus",
    "Middle frontal gyrus, orbital part",
    "Inferior frontal gyrus, opercular part",
    "Inferior frontal gyrus, triangular part",
    "Inferior frontal gyrus, orbital part",
    "Rolandic operculum",
    "Supplementary motor area",
    "Olfactory cortex",
    "Superior frontal gyrus, medial",
    "Superior frontal gyrus, medial orbital",
    "Gyrus rectus",
    "Insula",
    "Anterior cingulate gyrus",
    "Median cingulate gyrus",
    "Posterior cingulate gyrus",
    "Hippocampus",
    "Parahippocampal gyrus",
    "Amygdala",
    "Calcarine fissure",
    "Cuneus",
    "Lingual gyrus",
    "Superior occipital gyrus",
    "Middle occipital gyrus",
    "Inferior occipital gyrus",
    "Fusiform gyrus",
    "Postcentral gyrus",
    "Superior parietal gyrus",
    "Inferior parietal lobule",
    "Supramarginal gyrus",
    "Angular gyrus",
    "Precuneus",
    "Paracentral lobule",
    "Caudate nucleus",
    "Lenticular nucleus, putamen",
    "Lenticular nucleus, pallidum",
    "Thalamus",
    "Heschl gyrus",
    "Superior temporal gyrus",
    "Temporal pole, superior",
    "Middle temporal gyrus",
    "Temporal pole, middle",
    "Inferior temporal gyrus",
]

# The ranking table prints short names for a handful of regions where the
# long anatomical qualifier is conventionally dropped.
_SHORT = {
    "Superior frontal gyrus, dorsolateral": "Superior frontal gyrus",
    "Inferior parietal lobule": "Inferior parietal",
    "Temporal pole, superior": "Temporal pole",
}


def aal90_names(short=False):
    """Return the 90 region names in atlas order (left before right)."""
    names = []
    for base in _PAIRS:
        label = _SHORT.get(base, base) if short else base
        names.append(f"{label} left")
        names.append(f"{label} right")
    return names


AAL90 = aal90_names()
