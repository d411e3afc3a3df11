import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trampkit.errors import (
    DimensionMismatchError,
    NoTrampolineError,
    UninitialisedModelError,
)
from trampkit.extraction import (
    BackgroundModel,
    LineSource,
    TrampolineLine,
    contact_detect,
    detect_trampoline,
    extract_silhouette,
    foreground_mask,
    max_bbox_side,
    prepare_crop,
    set_trampoline_line,
    update_background,
)
from trampkit.raster import Frame, Rect, Silhouette, bounding_box, centroid, convex_hull


def gray_frame(h=60, w=80, value=100, index=0):
    return Frame(np.full((h, w, 3), value, dtype=np.uint8), index=index)


# ---------------------------------------------------------------------------
# Background model
# ---------------------------------------------------------------------------


def test_first_frame_initialises_mean():
    model = BackgroundModel(learning_rate=0.5)
    f = gray_frame(value=77)
    update_background(model, f)
    assert np.array_equal(model.mean, f.pixels.astype(np.float64))
    assert model.frames_seen == 1


def test_constant_video_is_fixed_point():
    model = BackgroundModel(learning_rate=0.2)
    f = gray_frame(value=42)
    for _ in range(5):
        update_background(model, f)
    assert np.allclose(model.mean, 42.0)


def test_half_alpha_two_step_average():
    model = BackgroundModel(learning_rate=0.5)
    update_background(model, gray_frame(value=0))
    update_background(model, gray_frame(value=255))
    assert np.allclose(model.mean, 127.5)


def test_dimension_mismatch_raises():
    model = BackgroundModel()
    update_background(model, gray_frame(h=10, w=10))
    with pytest.raises(DimensionMismatchError):
        update_background(model, gray_frame(h=12, w=10))


def test_bad_learning_rate_rejected():
    with pytest.raises(ValueError):
        BackgroundModel(learning_rate=0.0)
    with pytest.raises(ValueError):
        BackgroundModel(learning_rate=1.5)


# ---------------------------------------------------------------------------
# Foreground mask
# ---------------------------------------------------------------------------


def test_background_frame_gives_empty_mask():
    model = BackgroundModel()
    f = gray_frame()
    update_background(model, f)
    assert not foreground_mask(model, f, threshold=1).any()


def test_bright_patch_above_line_detected_exactly():
    model = BackgroundModel()
    bg = gray_frame(h=100, w=100, value=50)
    update_background(model, bg)
    scene = bg.pixels.copy()
    scene[10:30, 40:60] = 200
    mask = foreground_mask(model, Frame(scene), threshold=25, line=TrampolineLine(80))
    expect = np.zeros((100, 100), dtype=bool)
    expect[10:30, 40:60] = True
    assert np.array_equal(mask, expect)


def test_patch_below_line_cleared():
    model = BackgroundModel()
    bg = gray_frame(h=100, w=100, value=50)
    update_background(model, bg)
    scene = bg.pixels.copy()
    scene[85:95, 40:60] = 200
    mask = foreground_mask(model, Frame(scene), threshold=25, line=TrampolineLine(80))
    assert not mask.any()


def test_uninitialised_model_raises():
    with pytest.raises(UninitialisedModelError):
        foreground_mask(BackgroundModel(), gray_frame(), threshold=25)


# ---------------------------------------------------------------------------
# Silhouette extraction
# ---------------------------------------------------------------------------


def test_silhouette_centroid_near_blob_centroid():
    mask = np.zeros((120, 120), dtype=bool)
    yy, xx = np.mgrid[0:120, 0:120]
    blob = (yy - 60) ** 2 + (xx - 55) ** 2 <= 20**2
    mask |= blob
    sil = extract_silhouette(mask)
    assert sil is not None
    cx, cy = sil.centroid
    bx, by = centroid(blob)
    # the 2x2 morphology introduces a small deterministic offset
    assert abs(cx - bx) < 6 and abs(cy - by) < 6


def test_isolated_pixels_yield_no_subject():
    mask = np.zeros((40, 40), dtype=bool)
    mask[5, 5] = mask[20, 33] = mask[31, 7] = True
    assert extract_silhouette(mask) is None


def test_two_person_mask_keeps_larger():
    mask = np.zeros((200, 200), dtype=bool)
    mask[10:35, 10:30] = True  # 500 px
    mask[100:160, 100:150] = True  # 3000 px
    sil = extract_silhouette(mask)
    assert sil is not None
    cx, cy = sil.centroid
    assert 90 < cx < 165 and 90 < cy < 170


# ---------------------------------------------------------------------------
# Trampoline line
# ---------------------------------------------------------------------------


def make_band_frame(h=500, w=400, band=(300, 400), rgb=(30, 60, 200)):
    pixels = np.full((h, w, 3), 120, dtype=np.uint8)
    pixels[band[0]: band[1]] = rgb
    return Frame(pixels)


def test_detect_trampoline_band_top():
    line = detect_trampoline(make_band_frame(), hue_lo=170, hue_hi=260)
    assert line.top_row == 300
    assert line.source is LineSource.DETECTED


def test_detect_trampoline_no_match_raises():
    with pytest.raises(NoTrampolineError):
        detect_trampoline(gray_frame(), hue_lo=170, hue_hi=260)


def test_detect_trampoline_wrapped_hue_window():
    frame = make_band_frame(rgb=(200, 30, 40))  # red band, hue near 0
    line = detect_trampoline(frame, hue_lo=340, hue_hi=20)
    assert line.top_row == 300


def test_user_override():
    line = set_trampoline_line(412)
    assert line.top_row == 412
    assert line.source is LineSource.USER_ADJUSTED


# ---------------------------------------------------------------------------
# Contact detection
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "bottom,row,margin,expected",
    [(500, 490, 0, True), (100, 490, 0, False), (488, 490, 3, True), (484, 490, 3, False)],
)
def test_contact_examples(bottom, row, margin, expected):
    bbox = Rect(0, 0, 10, bottom)
    assert contact_detect(bbox, TrampolineLine(row), margin=margin) is expected


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 600), st.integers(0, 600), st.integers(0, 20))
def test_contact_monotone_in_bbox_bottom(bottom, row, margin):
    line = TrampolineLine(row)
    if contact_detect(Rect(0, 0, 1, bottom), line, margin):
        assert contact_detect(Rect(0, 0, 1, bottom + 1), line, margin)


# ---------------------------------------------------------------------------
# Crop preparation
# ---------------------------------------------------------------------------


def silhouette_for(mask):
    hull = convex_hull(mask)
    return Silhouette(mask=mask, centroid=centroid(mask), hull=hull, bbox=bounding_box(hull))


def test_crop_is_requested_size_and_centre_unchanged():
    rng = np.random.default_rng(3)
    pixels = rng.integers(0, 255, size=(200, 300, 3), dtype=np.uint8)
    mask = np.zeros((200, 300), dtype=bool)
    mask[90:110, 140:160] = True
    sil = silhouette_for(mask)
    crop = prepare_crop(Frame(pixels), sil, side=100, blur_radius=3, darken=0.5)
    assert crop.pixels.shape == (100, 100, 3)
    cx, cy = int(round(sil.centroid[0])), int(round(sil.centroid[1]))
    assert np.array_equal(crop.pixels[50, 50], pixels[cy, cx])


def test_identity_parameters_leave_background_unchanged():
    rng = np.random.default_rng(4)
    pixels = rng.integers(0, 255, size=(120, 120, 3), dtype=np.uint8)
    mask = np.zeros((120, 120), dtype=bool)
    mask[50:70, 50:70] = True
    crop = prepare_crop(Frame(pixels), silhouette_for(mask), side=40, blur_radius=0, darken=1.0)
    assert np.array_equal(crop.pixels, pixels[40:80, 40:80])


def test_foreground_pixels_never_modified():
    rng = np.random.default_rng(5)
    for _ in range(5):
        pixels = rng.integers(0, 255, size=(100, 100, 3), dtype=np.uint8)
        mask = np.zeros((100, 100), dtype=bool)
        mask[30:60, 35:65] = True
        sil = silhouette_for(mask)
        side = 70
        crop = prepare_crop(Frame(pixels), sil, side=side, blur_radius=5, darken=0.3)
        from trampkit.extraction import crop_window

        x0, y0 = crop_window(sil.centroid, side)
        for y in range(30, 60):
            for x in range(35, 65):
                assert np.array_equal(crop.pixels[y - y0, x - x0], pixels[y, x])


def test_crop_clamps_at_frame_edges():
    pixels = np.full((50, 50, 3), 9, dtype=np.uint8)
    mask = np.zeros((50, 50), dtype=bool)
    mask[0:4, 0:4] = True
    crop = prepare_crop(Frame(pixels), silhouette_for(mask), side=30, blur_radius=0, darken=1.0)
    assert crop.pixels.shape == (30, 30, 3)
    assert (crop.pixels == 9).all()


def test_max_bbox_side():
    def sil_with_side(w, h):
        mask = np.zeros((200, 200), dtype=bool)
        mask[10: 10 + h, 10: 10 + w] = True
        return silhouette_for(mask)

    sils = [sil_with_side(40, 20), sil_with_side(30, 90), sil_with_side(64, 64)]
    assert max_bbox_side(sils) == 90
    assert max_bbox_side([sils[0]]) == 40
    assert max_bbox_side([None, sils[2], None]) == 64
    with pytest.raises(ValueError):
        max_bbox_side([None])


def test_prepare_athlete_frame_crop_iff_airborne():
    from trampkit.extraction import prepare_athlete_frame

    rng = np.random.default_rng(8)
    pixels = rng.integers(0, 255, size=(100, 100, 3), dtype=np.uint8)
    mask = np.zeros((100, 100), dtype=bool)
    mask[30:60, 35:65] = True
    sil = silhouette_for(mask)
    airborne = prepare_athlete_frame(Frame(pixels), sil, False, side=50)
    assert airborne.crop is not None
    assert airborne.crop.pixels.shape == (50, 50, 3)
    assert airborne.crop_origin is not None
    contact = prepare_athlete_frame(Frame(pixels), sil, True, side=50)
    assert contact.crop is None and contact.in_contact
    missing = prepare_athlete_frame(Frame(pixels), None, False, side=50)
    assert missing.crop is None and missing.in_contact
