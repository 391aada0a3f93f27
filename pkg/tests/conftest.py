import numpy as np
import pytest
import torch

from contrastgan.conditions import ConditionSpace, ConditionVector
from contrastgan.data.manifest import ImageRecord
from contrastgan.data.phantom import PhantomSpec, build_phantom_dataset
from contrastgan.models import NetConfig

torch.set_num_threads(1)


@pytest.fixture
def space() -> ConditionSpace:
    return ConditionSpace()


@pytest.fixture
def tiny_net_config(space) -> NetConfig:
    """4 -> 16 px ladder small enough for shape/property tests."""
    return NetConfig(
        latent_dim=8,
        base_resolution=4,
        final_resolution=16,
        channels={4: 8, 8: 6, 16: 4},
        condition_dim=space.encoded_dim,
        ac_backbone="small",
    )


@pytest.fixture
def phantom_spec() -> PhantomSpec:
    return PhantomSpec(canvas=32, noise_sigma=0.05)


@pytest.fixture
def small_phantom_set(space, phantom_spec):
    return build_phantom_dataset(60, phantom_spec, space, seed=3)


def make_record(
    study="s1",
    series="se1",
    slice_index=2,
    slice_count=6,
    tr=3000.0,
    te=30.0,
    orientation="coronal",
    field=1.5,
    fat_sat=True,
    manufacturer="Siemens",
    coil=None,
    pixels=None,
) -> ImageRecord:
    return ImageRecord(
        study_id=study,
        series_id=series,
        slice_index=slice_index,
        slice_count=slice_count,
        tr_ms=tr,
        te_ms=te,
        orientation=orientation,
        field_strength_t=field,
        fat_saturated=fat_sat,
        series_description="test series",
        manufacturer=manufacturer,
        coil_manufacturer=coil,
        pixels=pixels,
    )


@pytest.fixture
def record_factory():
    return make_record


@pytest.fixture
def rng():
    return np.random.default_rng(0)
