package fixture.io;

import java.io.File;

public class FileTools {
    public void removeTemp(String path) {
        File file = new File(path);
        if (file.exists()) {
            file.delete();
        }
    }

    public void removeAll(String[] paths) {
        for (String p : paths) {
            File file = new File(p);
            file.delete();
        }
    }

    public int count(String[] paths) {
        int n = paths.length;
        return n;
    }
}
