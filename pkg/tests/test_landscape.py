import pytest

from firebreak_opt.errors import FormatError, ValidationError
from firebreak_opt.landscape import (FuelModel, load_fuel_table,
                                     load_landscape, neighbors, read_ascii_grid,
                                     synthetic_landscape, write_landscape,
                                     OPPOSITE)


def write_raster(path, rows, cellsize=100, nodata=-9999):
    ncols = len(rows[0])
    with open(path, "w") as fh:
        fh.write(f"ncols {ncols}\nnrows {len(rows)}\nxllcorner 0\nyllcorner 0\n")
        fh.write(f"cellsize {cellsize}\nNODATA_value {nodata}\n")
        for row in rows:
            fh.write(" ".join(str(v) for v in row) + "\n")


def write_lookup(path, rows):
    with open(path, "w") as fh:
        fh.write("code,name,flammable,base_spread_prob\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


@pytest.fixture
def tiny_files(tmp_path):
    raster = tmp_path / "fuel.asc"
    lookup = tmp_path / "lookup.csv"
    write_raster(raster, [[1, 1], [101, 1]])
    write_lookup(lookup, [(1, "grass", "true", 0.8), (101, "rock", "false", 0.0)])
    return raster, lookup


class TestLoadLandscape:
    def test_direct_read_back(self, tiny_files):
        ls = load_landscape(*tiny_files)
        assert (ls.width, ls.height) == (2, 2)
        assert ls.flammable_count == 3
        assert ls.flammable.tolist() == [True, True, False, True]
        assert ls.fuel_at(0).base_spread_prob == 0.8

    def test_hundred_meter_resolution_dimensions(self, tmp_path):
        # 100x100 cells at 100 m resolution covers 10,000 m x 10,000 m.
        raster = tmp_path / "big.asc"
        lookup = tmp_path / "lookup.csv"
        write_raster(raster, [[1] * 100 for _ in range(100)])
        write_lookup(lookup, [(1, "conifer", "true", 0.4)])
        ls = load_landscape(raster, lookup)
        assert ls.n_cells == 10_000
        assert ls.width * ls.cell_size == 10_000
        assert ls.height * ls.cell_size == 10_000

    def test_unknown_fuel_code(self, tmp_path):
        raster = tmp_path / "fuel.asc"
        lookup = tmp_path / "lookup.csv"
        write_raster(raster, [[1, 7], [1, 1]])
        write_lookup(lookup, [(1, "grass", "true", 0.8)])
        with pytest.raises(ValidationError, match="unknown fuel code 7"):
            load_landscape(raster, lookup)

    def test_malformed_header_names_line(self, tmp_path):
        bad = tmp_path / "bad.asc"
        bad.write_text("ncols 2\nwrong 2\nxllcorner 0\nyllcorner 0\ncellsize 100\n"
                       "NODATA_value -9999\n1 1\n1 1\n")
        with pytest.raises(FormatError, match="line 2"):
            read_ascii_grid(bad)

    def test_dimension_mismatch(self, tmp_path):
        bad = tmp_path / "short.asc"
        bad.write_text("ncols 2\nnrows 3\nxllcorner 0\nyllcorner 0\ncellsize 100\n"
                       "NODATA_value -9999\n1 1\n1 1\n")
        with pytest.raises(FormatError, match="expected 6 values"):
            read_ascii_grid(bad)

    def test_nodata_is_non_flammable(self, tmp_path):
        raster = tmp_path / "fuel.asc"
        lookup = tmp_path / "lookup.csv"
        write_raster(raster, [[1, -9999], [1, 1]])
        write_lookup(lookup, [(1, "grass", "true", 0.8)])
        ls = load_landscape(raster, lookup)
        assert not ls.flammable[1]
        assert ls.base_prob[1] == 0.0

    def test_aux_raster_dimension_check(self, tiny_files, tmp_path):
        elev = tmp_path / "elev.asc"
        write_raster(elev, [[10, 10, 10], [12, 12, 12]])
        with pytest.raises(ValidationError, match="do not match"):
            load_landscape(*tiny_files, elevation_path=elev)

    def test_aux_raster_accepted(self, tiny_files, tmp_path):
        elev = tmp_path / "elev.asc"
        write_raster(elev, [[10, 10], [12, 12]])
        ls = load_landscape(*tiny_files, elevation_path=elev)
        assert ls.n_cells == 4

    def test_round_trip(self, tiny_files, tmp_path):
        ls = load_landscape(*tiny_files)
        out = tmp_path / "rewritten.asc"
        write_landscape(out, ls)
        again = load_landscape(out, tiny_files[1])
        assert again == ls


class TestFuelTable:
    def test_non_flammable_must_have_zero_prob(self):
        with pytest.raises(ValidationError):
            FuelModel(code=9, name="rock", flammable=False, base_spread_prob=0.2)

    def test_prob_range(self):
        with pytest.raises(ValidationError):
            FuelModel(code=9, name="x", flammable=True, base_spread_prob=1.2)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "lookup.csv"
        path.write_text("id,name,burns,p\n1,grass,true,0.5\n")
        with pytest.raises(FormatError, match="bad header"):
            load_fuel_table(path)


class TestSyntheticAndNeighbors:
    def test_synthetic_sizes(self):
        assert synthetic_landscape(100, 100, 0.3).n_cells == 10_000
        assert synthetic_landscape(1, 1, 1.0).n_cells == 1

    def test_neighbor_counts_3x3(self):
        ls = synthetic_landscape(3, 3, 0.5)
        assert len(neighbors(ls, 4)) == 8   # center
        assert len(neighbors(ls, 0)) == 3   # corner
        assert len(neighbors(ls, 1)) == 5   # edge

    def test_neighbor_symmetry(self):
        ls = synthetic_landscape(5, 4, 0.5)
        for j in range(ls.n_cells):
            for k, direction in neighbors(ls, j):
                back = dict(neighbors(ls, k))
                assert back[j] == OPPOSITE[direction]

    def test_flammable_count_matches_table(self, tiny_files):
        ls = load_landscape(*tiny_files)
        expected = sum(1 for j in range(ls.n_cells)
                       if ls.fuel_table[int(ls.fuel_codes[j])].flammable)
        assert ls.flammable_count == expected
